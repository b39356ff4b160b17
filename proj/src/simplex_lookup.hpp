#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "hotda/filtration.hpp"

namespace hotda::detail {

inline constexpr SimplexIndex kNoSimplex = static_cast<SimplexIndex>(-1);

/// Binomial coefficients C(v, k) for v <= n, k <= kMaxSimplexDim + 1.
class BinomialTable {
 public:
  explicit BinomialTable(std::size_t n);

  std::uint64_t operator()(std::size_t v, std::size_t k) const {
    return k > v ? 0 : table_[v * (kMaxSimplexDim + 2) + k];
  }

 private:
  std::vector<std::uint64_t> table_;
};

/// Maps a sorted vertex tuple to its position in the filtration.
class SimplexLookup {
 public:
  explicit SimplexLookup(const FilteredComplex& complex);

  /// Position of the simplex with these (strictly increasing) vertices, or kNoSimplex.
  SimplexIndex find(std::span<const VertexId> vertices) const;

  std::uint64_t key(std::span<const VertexId> vertices) const {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < vertices.size(); ++i) k += binom_(vertices[i], i + 1);
    return k;
  }

 private:
  BinomialTable binom_;
  // one table per dimension; dense when the key space is small enough
  std::vector<std::vector<SimplexIndex>> dense_;
  std::vector<std::unordered_map<std::uint64_t, SimplexIndex>> sparse_;
  std::vector<bool> is_dense_;
};

}  // namespace hotda::detail
