#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hotda {

/// Regional signals, one row per region and one column per time point.
struct TimeSeriesMatrix {
  std::string subject_id;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, rows * cols

  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

/// Symmetric dissimilarity matrix with zero diagonal and entries in [0, 2].
struct DistanceMatrix {
  std::string subject_id;
  std::size_t n = 0;
  std::vector<double> w;  // row-major, n * n

  double operator()(std::size_t i, std::size_t j) const { return w[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return w[i * n + j]; }
};

enum class Label : int { Control = 0, Case = 1 };

struct CohortRecord {
  std::string subject_id;
  Label label = Label::Control;
  DistanceMatrix distance;
};

/// Checks N >= 3, T >= 2 and that no row is constant.
void validate(const TimeSeriesMatrix& ts);

/// w[i][j] = 1 - Pearson(row i, row j), sample covariance with denominator T - 1.
DistanceMatrix distance_matrix(const TimeSeriesMatrix& ts);

/// Reads a headerless CSV of N rows by T numeric columns.
TimeSeriesMatrix load_time_series(const std::filesystem::path& path, std::string id);

/// Reads a headerless N x N CSV. Asymmetry up to 1e-9 is averaged away.
DistanceMatrix load_distance_matrix(const std::filesystem::path& path, std::string id);

/// Validates and (within tolerance) symmetrizes an in-memory matrix.
DistanceMatrix make_distance_matrix(std::string id, std::size_t n, std::vector<double> values);

enum class Shape { Circle, Sphere, TwoClusters, UniformNoise };

Shape parse_shape(std::string_view name);
std::string_view to_string(Shape shape);

struct ShapeSpec {
  Shape shape = Shape::Circle;
  std::size_t n_points = 40;
  double noise_sigma = 0.0;
};

/// Raw sample coordinates (3 per point, z = 0 for planar shapes), before rescaling.
std::vector<double> sample_shape(Shape shape, std::size_t n_points, double noise_sigma,
                                 std::uint64_t seed);

/// Euclidean distances of `points` (3 coordinates each) rescaled so the maximum is 2.
DistanceMatrix rescaled_distances(std::string id, std::span<const double> points);

DistanceMatrix synth_point_cloud(Shape shape, std::size_t n_points, double noise_sigma,
                                 std::uint64_t seed);

/// class_a subjects get label 0, class_b label 1; interleaved a0, b0, a1, b1, ...
std::vector<CohortRecord> synth_cohort(std::size_t n_per_class, const ShapeSpec& class_a,
                                       const ShapeSpec& class_b, std::uint64_t seed);

/// CSV writers producing files the loaders above accept; 17 significant digits.
void write_matrix_csv(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                      std::span<const double> values);

}  // namespace hotda
