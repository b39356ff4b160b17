#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hotda/filtration.hpp"
#include "hotda/ingest.hpp"

namespace hotda {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PersistencePair {
  std::size_t dim = 0;
  double birth = 0.0;
  double death = kInfinity;  // +inf marks an essential class

  // Filtration positions of the creating and destroying simplices, when known
  // (absent for diagrams read back from CSV).
  std::optional<SimplexIndex> birth_simplex;
  std::optional<SimplexIndex> death_simplex;

  bool essential() const { return death == kInfinity; }
  double persistence() const { return death - birth; }
  /// Alive at t under the half-open convention birth <= t < death.
  bool alive_at(double t) const { return birth <= t && t < death; }
};

struct PersistenceDiagram {
  std::string subject_id;
  std::vector<PersistencePair> pairs;
  double max_eps = 2.0;
  std::size_t max_hom_dim = 2;  // highest homology dimension computed

  std::vector<PersistencePair> in_dim(std::size_t dim) const;
  std::size_t live_count(std::size_t dim, double t) const;
};

/// Complete simplex pairing of a filtration, zero-persistence pairs included.
/// Index pairs per homology dimension; kNoDeath marks essential classes.
struct FiltrationPairing {
  static constexpr SimplexIndex kNoDeath = static_cast<SimplexIndex>(-1);
  struct IndexPair {
    SimplexIndex birth;
    SimplexIndex death;
  };
  std::vector<std::vector<IndexPair>> by_dim;
};

/// Persistent cohomology over GF(2) with clearing, dimension by dimension from
/// H0 upward. Reports H_k for k < complex.max_dim.
FiltrationPairing compute_pairing(const FilteredComplex& complex);

/// Persistence diagram of the filtration; zero-persistence pairs are dropped and
/// pairs are sorted by (dim, birth, death).
PersistenceDiagram compute_persistence(const FilteredComplex& complex);

/// Essential bars get death = max_eps; used by every vectorization.
PersistenceDiagram truncate_essential(const PersistenceDiagram& diagram);

/// Betti numbers of the Rips complex at `eps` from dense GF(2) ranks. Builds its
/// own simplex list by brute-force subset enumeration.
std::array<std::size_t, 3> betti_oracle(const DistanceMatrix& d, double eps,
                                        std::size_t max_dim = 3,
                                        std::size_t max_simplices = 20000);

struct CycleFootprint {
  std::size_t dim = 1;
  PersistencePair pair;
  std::vector<VertexId> vertices;  // ascending
};

/// Vertex sets of representative cycles. Finite pairs use the reduced boundary
/// column of the destroying simplex; essential pairs (only when requested) use
/// the chain that reduces the creating simplex's boundary to zero.
std::vector<CycleFootprint> cycle_footprints(const FilteredComplex& complex,
                                             const PersistenceDiagram& diagram,
                                             bool include_essential = false);

/// count[v] = number of H1/H2 classes alive in the Rips complex at `eps` whose
/// representative cycle touches v.
std::vector<std::size_t> node_participation(const DistanceMatrix& d, double eps,
                                            std::size_t max_simplices = kDefaultSimplexCap);

/// CSV with header "dim,birth,death", "inf" for essential classes.
void write_diagram_csv(const std::filesystem::path& path, const PersistenceDiagram& diagram);
PersistenceDiagram read_diagram_csv(const std::filesystem::path& path, std::string subject_id,
                                    double max_eps = 2.0);

}  // namespace hotda
