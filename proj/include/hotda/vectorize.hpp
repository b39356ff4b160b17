#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hotda/ingest.hpp"
#include "hotda/persistence.hpp"

namespace hotda {

struct Interval {
  double lo = 0.0;
  double hi = 2.0;
  double width() const { return hi - lo; }
};

struct VectorizationConfig {
  std::size_t n_bins = 100;
  std::vector<std::size_t> n_layers{1, 2};
  std::vector<double> heat_sigmas{1.2, 1.4};
  std::size_t heat_grid = 10;
  Interval range{};
  std::size_t max_hom_dim = 2;

  /// Throws InvalidArgument when an invariant fails.
  void validate() const;
};

/// Cell centers of `n` equal subdivisions of `range`.
std::vector<double> sample_grid(const Interval& range, std::size_t n);

// Each homology-dimension block is laid out for dims 0..max_hom_dim in order.
// Essential bars are treated as dying at diagram.max_eps.

/// Segments ordered by (dim, layer); layer l is the pointwise l-th largest tent.
std::vector<double> landscape(const PersistenceDiagram& diagram, std::size_t layers,
                              std::size_t n_bins, const Interval& range,
                              std::size_t max_hom_dim = 2);

/// Live-bar counts with birth <= t < death.
std::vector<double> betti_curve(const PersistenceDiagram& diagram, std::size_t n_bins,
                                const Interval& range, std::size_t max_hom_dim = 2);

/// Sum of isotropic Gaussians centered at (birth, death), evaluated at the
/// cell centers of a grid x grid lattice; index = birth_cell * grid + death_cell.
std::vector<double> heat_kernel(const PersistenceDiagram& diagram, double sigma, std::size_t grid,
                                const Interval& range, std::size_t max_hom_dim = 2);

/// Natural-log Shannon entropy of normalized lifetimes; 0 for an empty dimension.
std::vector<double> persistent_entropy(const PersistenceDiagram& diagram,
                                       std::size_t max_hom_dim = 2);

/// Correlations 1 - w[i][j] over the strict upper triangle, row-major.
std::vector<double> lower_order(const DistanceMatrix& d);

struct Segment {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct FeatureVector {
  std::string subject_id;
  std::vector<double> values;
  std::vector<Segment> layout;
};

struct FeatureParts {
  std::string subject_id;
  std::vector<std::vector<double>> landscapes;  // one per config.n_layers entry
  std::vector<double> betti;
  std::vector<std::vector<double>> heat;  // one per config.heat_sigmas entry
  std::vector<double> entropy;
  std::vector<double> lower;
};

/// Expected layout for `n_regions` regions under `config`.
std::vector<Segment> feature_layout(const VectorizationConfig& config, std::size_t n_regions);

/// Concatenates landscapes, Betti curve, heat kernels, entropy and lower-order
/// features. Throws LayoutMismatch if any part has the wrong length.
FeatureVector fuse(const FeatureParts& parts, const VectorizationConfig& config);

/// Computes every part from a diagram and its distance matrix, then fuses them.
FeatureParts compute_parts(const PersistenceDiagram& diagram, const DistanceMatrix& d,
                           const VectorizationConfig& config);
FeatureVector extract_features(const PersistenceDiagram& diagram, const DistanceMatrix& d,
                               const VectorizationConfig& config);

}  // namespace hotda
