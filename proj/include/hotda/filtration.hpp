#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hotda/ingest.hpp"

namespace hotda {

using VertexId = std::uint16_t;

/// Index of a simplex in filtration order.
using SimplexIndex = std::uint32_t;

inline constexpr std::size_t kMaxSimplexDim = 3;
inline constexpr std::size_t kDefaultSimplexCap = std::size_t{1} << 26;

struct FilteredSimplex {
  double value = 0.0;  // diameter; 0 for vertices
  std::array<VertexId, kMaxSimplexDim + 1> vertex{};
  std::uint8_t dim = 0;

  std::span<const VertexId> vertices() const { return {vertex.data(), std::size_t{dim} + 1}; }
};

/// (value, dim, lexicographic vertices)
bool filtration_less(const FilteredSimplex& a, const FilteredSimplex& b);

/// Every simplex of the Rips complex up to `max_dim` with diameter <= `max_eps`,
/// sorted so that faces precede cofaces.
struct FilteredComplex {
  std::size_t n_vertices = 0;
  std::size_t max_dim = 0;
  double max_eps = 0.0;
  std::vector<FilteredSimplex> simplices;

  std::size_t size() const { return simplices.size(); }
  std::size_t count(std::size_t dim) const;
};

struct RipsOptions {
  std::size_t max_dim = 3;
  double max_eps = 2.0;
  std::size_t max_simplices = kDefaultSimplexCap;
};

/// Throws ComplexTooLarge once the simplex count passes `max_simplices`.
FilteredComplex build_rips(const DistanceMatrix& d, const RipsOptions& options = {});

/// Debug dump: "value dim v0 v1 ...", one simplex per line.
void write_complex(std::ostream& out, const FilteredComplex& complex);

}  // namespace hotda
