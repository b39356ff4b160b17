#include "hotda/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hotda/error.hpp"
#include "hotda/rng.hpp"

namespace hotda {

namespace {

constexpr double kCorrelationClampTolerance = 1e-12;
constexpr double kSymmetryTolerance = 1e-9;
constexpr double kDiagonalTolerance = 1e-12;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct CsvTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};

CsvTable read_numeric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());

  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty()) continue;

    std::size_t column = 0;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = content.find(',', start);
      const std::string_view cell =
          trim(content.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                     : comma - start));
      ++column;
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() ||
          !std::isfinite(value)) {
        throw Error(ErrorCode::ParseError, path.string() + " line " + std::to_string(line_no) +
                                               " column " + std::to_string(column) + ": '" +
                                               std::string(cell) + "'");
      }
      table.values.push_back(value);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }

    if (table.rows == 0) {
      table.cols = column;
    } else if (column != table.cols) {
      throw Error(ErrorCode::ParseError, path.string() + " line " + std::to_string(line_no) +
                                             ": expected " + std::to_string(table.cols) +
                                             " columns, found " + std::to_string(column));
    }
    ++table.rows;
  }
  return table;
}

std::vector<double> pairwise_euclidean(std::span<const double> points) {
  const std::size_t n = points.size() / 3;
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = points[3 * i] - points[3 * j];
      const double dy = points[3 * i + 1] - points[3 * j + 1];
      const double dz = points[3 * i + 2] - points[3 * j + 2];
      const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
      d[i * n + j] = dist;
      d[j * n + i] = dist;
    }
  }
  return d;
}

}  // namespace

void validate(const TimeSeriesMatrix& ts) {
  if (ts.rows < 3 || ts.cols < 2) {
    throw Error(ErrorCode::DimensionTooSmall, "need N >= 3 regions and T >= 2 time points, got " +
                                                  std::to_string(ts.rows) + "x" +
                                                  std::to_string(ts.cols));
  }
  if (ts.data.size() != ts.rows * ts.cols) {
    throw Error(ErrorCode::InvalidArgument, "time series data size does not match shape");
  }
  for (std::size_t i = 0; i < ts.rows; ++i) {
    const auto r = ts.row(i);
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    if (*lo == *hi) throw Error(ErrorCode::ZeroVarianceRow, "row " + std::to_string(i));
  }
}

DistanceMatrix distance_matrix(const TimeSeriesMatrix& ts) {
  validate(ts);
  const std::size_t n = ts.rows;
  const std::size_t t = ts.cols;

  std::vector<double> centered(ts.data.size());
  std::vector<double> stddev(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = ts.row(i);
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(t);
    double ss = 0.0;
    for (std::size_t k = 0; k < t; ++k) {
      const double c = r[k] - mean;
      centered[i * t + k] = c;
      ss += c * c;
    }
    stddev[i] = std::sqrt(ss / static_cast<double>(t - 1));
  }

  DistanceMatrix out;
  out.subject_id = ts.subject_id;
  out.n = n;
  out.w.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double cov = 0.0;
      for (std::size_t k = 0; k < t; ++k) cov += centered[i * t + k] * centered[j * t + k];
      cov /= static_cast<double>(t - 1);
      double rho = cov / (stddev[i] * stddev[j]);
      if (!std::isfinite(rho) || std::abs(rho) > 1.0 + kCorrelationClampTolerance) {
        throw Error(ErrorCode::InvariantViolation,
                    "correlation of rows " + std::to_string(i) + "," + std::to_string(j) +
                        " outside [-1, 1] beyond clamp tolerance");
      }
      rho = std::clamp(rho, -1.0, 1.0);
      const double dist = 1.0 - rho;
      out.at(i, j) = dist;
      out.at(j, i) = dist;
    }
  }
  return out;
}

TimeSeriesMatrix load_time_series(const std::filesystem::path& path, std::string id) {
  CsvTable table = read_numeric_csv(path);
  TimeSeriesMatrix ts;
  ts.subject_id = std::move(id);
  ts.rows = table.rows;
  ts.cols = table.cols;
  ts.data = std::move(table.values);
  try {
    validate(ts);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvariantViolation, path.string() + ": " + e.what());
  }
  return ts;
}

DistanceMatrix make_distance_matrix(std::string id, std::size_t n, std::vector<double> values) {
  if (values.size() != n * n) {
    throw Error(ErrorCode::InvariantViolation, "distance matrix is not square");
  }
  if (n < 3) throw Error(ErrorCode::DimensionTooSmall, "need at least 3 regions");

  DistanceMatrix d;
  d.subject_id = std::move(id);
  d.n = n;
  d.w = std::move(values);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(d(i, i)) > kDiagonalTolerance) {
      throw Error(ErrorCode::NonzeroDiagonal, "w[" + std::to_string(i) + "][" +
                                                  std::to_string(i) +
                                                  "] = " + std::to_string(d(i, i)));
    }
    d.at(i, i) = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = d(i, j);
      if (!(v >= 0.0 && v <= 2.0)) {
        throw Error(ErrorCode::EntryOutOfRange, "w[" + std::to_string(i) + "][" +
                                                    std::to_string(j) +
                                                    "] = " + std::to_string(v));
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = d(i, j);
      const double b = d(j, i);
      if (std::abs(a - b) > kSymmetryTolerance) {
        throw Error(ErrorCode::NotSymmetric, "w[" + std::to_string(i) + "][" +
                                                 std::to_string(j) + "] != w[" +
                                                 std::to_string(j) + "][" + std::to_string(i) +
                                                 "]");
      }
      const double avg = 0.5 * (a + b);
      d.at(i, j) = avg;
      d.at(j, i) = avg;
    }
  }
  return d;
}

DistanceMatrix load_distance_matrix(const std::filesystem::path& path, std::string id) {
  CsvTable table = read_numeric_csv(path);
  if (table.rows != table.cols) {
    throw Error(ErrorCode::InvariantViolation, path.string() + ": " +
                                                   std::to_string(table.rows) + "x" +
                                                   std::to_string(table.cols) +
                                                   " matrix is not square");
  }
  return make_distance_matrix(std::move(id), table.rows, std::move(table.values));
}

Shape parse_shape(std::string_view name) {
  if (name == "circle") return Shape::Circle;
  if (name == "sphere") return Shape::Sphere;
  if (name == "two_clusters") return Shape::TwoClusters;
  if (name == "uniform_noise" || name == "noise") return Shape::UniformNoise;
  throw Error(ErrorCode::InvalidArgument, "unknown shape '" + std::string(name) + "'");
}

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::Circle: return "circle";
    case Shape::Sphere: return "sphere";
    case Shape::TwoClusters: return "two_clusters";
    case Shape::UniformNoise: return "uniform_noise";
  }
  return "unknown";
}

std::vector<double> sample_shape(Shape shape, std::size_t n_points, double noise_sigma,
                                 std::uint64_t seed) {
  if (n_points < 4) {
    throw Error(ErrorCode::TooFewPoints, "need at least 4 points, got " + std::to_string(n_points));
  }
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_sigma must be >= 0");

  Rng rng(seed);
  std::vector<double> pts(3 * n_points, 0.0);
  constexpr double kClusterSpread = 0.25;
  const double kGoldenAngle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < n_points; ++i) {
    double* p = &pts[3 * i];
    switch (shape) {
      case Shape::Circle: {
        // one jittered angle per equal arc, so coverage has no large gaps
        const double theta =
            phase + 2.0 * std::numbers::pi * (static_cast<double>(i) + rng.uniform()) / static_cast<double>(n_points);
        p[0] = std::cos(theta);
        p[1] = std::sin(theta);
        break;
      }
      case Shape::Sphere: {
        // jittered Fibonacci lattice: z stratified into equal-area bands
        const double z = 1.0 - 2.0 * (static_cast<double>(i) + rng.uniform()) / static_cast<double>(n_points);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = phase + kGoldenAngle * static_cast<double>(i);
        p[0] = r * std::cos(phi);
        p[1] = r * std::sin(phi);
        p[2] = z;
        break;
      }
      case Shape::TwoClusters: {
        const double cx = (i % 2 == 0) ? -1.0 : 1.0;
        p[0] = rng.normal(cx, kClusterSpread);
        p[1] = rng.normal(0.0, kClusterSpread);
        p[2] = rng.normal(0.0, kClusterSpread);
        break;
      }
      case Shape::UniformNoise: {
        p[0] = rng.uniform(-1.0, 1.0);
        p[1] = rng.uniform(-1.0, 1.0);
        p[2] = rng.uniform(-1.0, 1.0);
        break;
      }
    }
  }
  if (noise_sigma > 0.0) {
    // planar shapes stay planar
    const std::size_t dims = shape == Shape::Circle ? 2 : 3;
    for (std::size_t i = 0; i < n_points; ++i) {
      for (std::size_t c = 0; c < dims; ++c) pts[3 * i + c] += rng.normal(0.0, noise_sigma);
    }
  }
  return pts;
}

DistanceMatrix rescaled_distances(std::string id, std::span<const double> points) {
  const std::size_t n = points.size() / 3;
  std::vector<double> d = pairwise_euclidean(points);
  const double max_dist = *std::max_element(d.begin(), d.end());
  if (!(max_dist > 0.0)) {
    throw Error(ErrorCode::InvariantViolation, "all points coincide; cannot rescale");
  }
  const double scale = 2.0 / max_dist;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double& v = d[i * n + j];
      v = (i == j) ? 0.0 : std::min(2.0, v * scale);
    }
  }
  DistanceMatrix out;
  out.subject_id = std::move(id);
  out.n = n;
  out.w = std::move(d);
  return out;
}

DistanceMatrix synth_point_cloud(Shape shape, std::size_t n_points, double noise_sigma,
                                 std::uint64_t seed) {
  const auto pts = sample_shape(shape, n_points, noise_sigma, seed);
  return rescaled_distances(std::string(to_string(shape)) + "_" + std::to_string(seed), pts);
}

std::vector<CohortRecord> synth_cohort(std::size_t n_per_class, const ShapeSpec& class_a,
                                       const ShapeSpec& class_b, std::uint64_t seed) {
  if (n_per_class < 2) {
    throw Error(ErrorCode::InvalidArgument, "n_per_class must be >= 2");
  }
  std::vector<CohortRecord> cohort;
  cohort.reserve(2 * n_per_class);
  char name[64];
  for (std::size_t i = 0; i < n_per_class; ++i) {
    for (int cls = 0; cls < 2; ++cls) {
      const ShapeSpec& spec = cls == 0 ? class_a : class_b;
      const std::uint64_t index = 2 * i + static_cast<std::uint64_t>(cls);
      std::snprintf(name, sizeof(name), "sub%04zu_%s", static_cast<std::size_t>(index),
                    cls == 0 ? "a" : "b");
      CohortRecord rec;
      rec.subject_id = name;
      rec.label = cls == 0 ? Label::Control : Label::Case;
      rec.distance = synth_point_cloud(spec.shape, spec.n_points, spec.noise_sigma,
                                       derive_seed(seed, index));
      rec.distance.subject_id = rec.subject_id;
      cohort.push_back(std::move(rec));
    }
  }
  return cohort;
}

void write_matrix_csv(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                      std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  char buf[32];
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", values[i * cols + j]);
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace hotda
