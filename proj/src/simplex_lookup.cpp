#include "simplex_lookup.hpp"

namespace hotda::detail {

BinomialTable::BinomialTable(std::size_t n) : table_((n + 1) * (kMaxSimplexDim + 2), 0) {
  constexpr std::size_t width = kMaxSimplexDim + 2;
  for (std::size_t v = 0; v <= n; ++v) {
    table_[v * width] = 1;
    for (std::size_t k = 1; k < width && k <= v; ++k) {
      const std::uint64_t left = table_[(v - 1) * width + k - 1];
      const std::uint64_t up = k <= v - 1 ? table_[(v - 1) * width + k] : 0;
      table_[v * width + k] = left + up;
    }
  }
}

SimplexLookup::SimplexLookup(const FilteredComplex& complex)
    : binom_(complex.n_vertices),
      dense_(kMaxSimplexDim + 1),
      sparse_(kMaxSimplexDim + 1),
      is_dense_(kMaxSimplexDim + 1, true) {
  std::vector<std::size_t> counts(kMaxSimplexDim + 1, 0);
  for (const auto& s : complex.simplices) ++counts[s.dim];

  constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 23;
  for (std::size_t dim = 0; dim <= kMaxSimplexDim; ++dim) {
    if (counts[dim] == 0) continue;
    const std::uint64_t space = binom_(complex.n_vertices, dim + 1);
    if (space <= kDenseLimit || space <= 4 * static_cast<std::uint64_t>(counts[dim])) {
      dense_[dim].assign(space, kNoSimplex);
    } else {
      is_dense_[dim] = false;
      sparse_[dim].reserve(counts[dim]);
    }
  }

  for (std::size_t idx = 0; idx < complex.simplices.size(); ++idx) {
    const auto& s = complex.simplices[idx];
    const std::uint64_t k = key(s.vertices());
    if (is_dense_[s.dim]) {
      dense_[s.dim][k] = static_cast<SimplexIndex>(idx);
    } else {
      sparse_[s.dim].emplace(k, static_cast<SimplexIndex>(idx));
    }
  }
}

SimplexIndex SimplexLookup::find(std::span<const VertexId> vertices) const {
  const std::size_t dim = vertices.size() - 1;
  if (dim > kMaxSimplexDim) return kNoSimplex;
  const std::uint64_t k = key(vertices);
  if (is_dense_[dim]) {
    const auto& table = dense_[dim];
    return k < table.size() ? table[k] : kNoSimplex;
  }
  const auto it = sparse_[dim].find(k);
  return it == sparse_[dim].end() ? kNoSimplex : it->second;
}

}  // namespace hotda::detail
