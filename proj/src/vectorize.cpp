#include "hotda/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

#include "hotda/error.hpp"

namespace hotda {

namespace {

struct Bar {
  double birth;
  double death;
};

std::vector<std::vector<Bar>> bars_by_dim(const PersistenceDiagram& diagram, std::size_t max_hom_dim) {
  std::vector<std::vector<Bar>> out(max_hom_dim + 1);
  for (const auto& p : diagram.pairs) {
    if (p.dim > max_hom_dim) continue;
    out[p.dim].push_back({p.birth, p.essential() ? diagram.max_eps : p.death});
  }
  return out;
}

double tent(const Bar& b, double t) { return std::max(0.0, std::min(t - b.birth, b.death - t)); }

}  // namespace

void VectorizationConfig::validate() const {
  if (n_bins < 2) throw Error(ErrorCode::InvalidArgument, "n_bins must be >= 2");
  if (heat_grid < 2) throw Error(ErrorCode::InvalidArgument, "heat_grid must be >= 2");
  if (!(range.lo < range.hi)) throw Error(ErrorCode::InvalidArgument, "range.lo must be < range.hi");
  for (double s : heat_sigmas) {
    if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "heat sigmas must be > 0");
  }
  for (std::size_t l : n_layers) {
    if (l < 1) throw Error(ErrorCode::InvalidArgument, "landscape depth must be >= 1");
  }
}

std::vector<double> sample_grid(const Interval& range, std::size_t n) {
  std::vector<double> t(n);
  const double h = range.width() / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = range.lo + (static_cast<double>(i) + 0.5) * h;
  return t;
}

std::vector<double> landscape(const PersistenceDiagram& diagram, std::size_t layers,
                              std::size_t n_bins, const Interval& range, std::size_t max_hom_dim) {
  if (layers < 1) throw Error(ErrorCode::InvalidArgument, "layers must be >= 1");
  const auto bars = bars_by_dim(diagram, max_hom_dim);
  const auto grid = sample_grid(range, n_bins);
  std::vector<double> out((max_hom_dim + 1) * layers * n_bins, 0.0);
  std::vector<double> values;
  for (std::size_t dim = 0; dim <= max_hom_dim; ++dim) {
    for (std::size_t i = 0; i < n_bins; ++i) {
      values.clear();
      for (const Bar& b : bars[dim]) values.push_back(tent(b, grid[i]));
      const std::size_t depth = std::min(layers, values.size());
      std::partial_sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(depth),
                        values.end(), std::greater<>());
      for (std::size_t l = 0; l < depth; ++l) {
        out[(dim * layers + l) * n_bins + i] = values[l];
      }
    }
  }
  return out;
}

std::vector<double> betti_curve(const PersistenceDiagram& diagram, std::size_t n_bins,
                                const Interval& range, std::size_t max_hom_dim) {
  const auto bars = bars_by_dim(diagram, max_hom_dim);
  const auto grid = sample_grid(range, n_bins);
  std::vector<double> out((max_hom_dim + 1) * n_bins, 0.0);
  for (std::size_t dim = 0; dim <= max_hom_dim; ++dim) {
    for (const Bar& b : bars[dim]) {
      for (std::size_t i = 0; i < n_bins; ++i) {
        if (b.birth <= grid[i] && grid[i] < b.death) out[dim * n_bins + i] += 1.0;
      }
    }
  }
  return out;
}

std::vector<double> heat_kernel(const PersistenceDiagram& diagram, double sigma, std::size_t grid,
                                const Interval& range, std::size_t max_hom_dim) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be > 0");
  const auto bars = bars_by_dim(diagram, max_hom_dim);
  const auto axis = sample_grid(range, grid);
  const double norm = 1.0 / (2.0 * std::numbers::pi * sigma * sigma);
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> out((max_hom_dim + 1) * grid * grid, 0.0);
  for (std::size_t dim = 0; dim <= max_hom_dim; ++dim) {
    double* block = out.data() + dim * grid * grid;
    for (const Bar& b : bars[dim]) {
      for (std::size_t ix = 0; ix < grid; ++ix) {
        const double dx = axis[ix] - b.birth;
        for (std::size_t iy = 0; iy < grid; ++iy) {
          const double dy = axis[iy] - b.death;
          block[ix * grid + iy] += norm * std::exp(-(dx * dx + dy * dy) * inv_two_var);
        }
      }
    }
  }
  return out;
}

std::vector<double> persistent_entropy(const PersistenceDiagram& diagram, std::size_t max_hom_dim) {
  const auto bars = bars_by_dim(diagram, max_hom_dim);
  std::vector<double> out(max_hom_dim + 1, 0.0);
  for (std::size_t dim = 0; dim <= max_hom_dim; ++dim) {
    double total = 0.0;
    for (const Bar& b : bars[dim]) total += b.death - b.birth;
    if (!(total > 0.0)) continue;
    double h = 0.0;
    for (const Bar& b : bars[dim]) {
      const double p = (b.death - b.birth) / total;
      if (p > 0.0) h -= p * std::log(p);
    }
    out[dim] = h;
  }
  return out;
}

std::vector<double> lower_order(const DistanceMatrix& d) {
  std::vector<double> out;
  out.reserve(d.n * (d.n - 1) / 2);
  for (std::size_t i = 0; i < d.n; ++i) {
    for (std::size_t j = i + 1; j < d.n; ++j) out.push_back(1.0 - d(i, j));
  }
  return out;
}

std::vector<Segment> feature_layout(const VectorizationConfig& config, std::size_t n_regions) {
  const std::size_t dims = config.max_hom_dim + 1;
  std::vector<Segment> layout;
  std::size_t offset = 0;
  auto push = [&](std::string name, std::size_t length) {
    layout.push_back({std::move(name), offset, length});
    offset += length;
  };
  char name[64];
  for (std::size_t depth : config.n_layers) {
    std::snprintf(name, sizeof(name), "landscape_depth%zu", depth);
    push(name, dims * depth * config.n_bins);
  }
  push("betti_curve", dims * config.n_bins);
  for (double sigma : config.heat_sigmas) {
    std::snprintf(name, sizeof(name), "heat_kernel_sigma%g", sigma);
    push(name, dims * config.heat_grid * config.heat_grid);
  }
  push("persistent_entropy", dims);
  push("lower_order", n_regions * (n_regions - 1) / 2);
  return layout;
}

FeatureVector fuse(const FeatureParts& parts, const VectorizationConfig& config) {
  if (parts.landscapes.size() != config.n_layers.size() ||
      parts.heat.size() != config.heat_sigmas.size()) {
    throw Error(ErrorCode::LayoutMismatch, "part counts disagree with the configuration");
  }
  // recover N from the lower-order length L = N(N-1)/2
  const std::size_t lower = parts.lower.size();
  const auto n_regions = static_cast<std::size_t>(std::llround(0.5 + std::sqrt(0.25 + 2.0 * static_cast<double>(lower))));
  if (n_regions * (n_regions - 1) / 2 != lower) {
    throw Error(ErrorCode::LayoutMismatch, "lower-order length is not a triangular number");
  }

  std::vector<const std::vector<double>*> ordered;
  for (const auto& l : parts.landscapes) ordered.push_back(&l);
  ordered.push_back(&parts.betti);
  for (const auto& h : parts.heat) ordered.push_back(&h);
  ordered.push_back(&parts.entropy);
  ordered.push_back(&parts.lower);

  FeatureVector fv;
  fv.subject_id = parts.subject_id;
  fv.layout = feature_layout(config, n_regions);
  for (std::size_t s = 0; s < ordered.size(); ++s) {
    if (ordered[s]->size() != fv.layout[s].length) {
      throw Error(ErrorCode::LayoutMismatch, "segment " + fv.layout[s].name + " has length " +
                                                 std::to_string(ordered[s]->size()) + ", expected " +
                                                 std::to_string(fv.layout[s].length));
    }
  }
  fv.values.reserve(fv.layout.back().offset + fv.layout.back().length);
  for (const auto* part : ordered) fv.values.insert(fv.values.end(), part->begin(), part->end());
  return fv;
}

FeatureParts compute_parts(const PersistenceDiagram& diagram, const DistanceMatrix& d,
                           const VectorizationConfig& config) {
  config.validate();
  FeatureParts parts;
  parts.subject_id = d.subject_id;
  for (std::size_t depth : config.n_layers) {
    parts.landscapes.push_back(landscape(diagram, depth, config.n_bins, config.range, config.max_hom_dim));
  }
  parts.betti = betti_curve(diagram, config.n_bins, config.range, config.max_hom_dim);
  for (double sigma : config.heat_sigmas) {
    parts.heat.push_back(heat_kernel(diagram, sigma, config.heat_grid, config.range, config.max_hom_dim));
  }
  parts.entropy = persistent_entropy(diagram, config.max_hom_dim);
  parts.lower = lower_order(d);
  return parts;
}

FeatureVector extract_features(const PersistenceDiagram& diagram, const DistanceMatrix& d,
                               const VectorizationConfig& config) {
  return fuse(compute_parts(diagram, d, config), config);
}

}  // namespace hotda
