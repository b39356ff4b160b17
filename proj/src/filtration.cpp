#include "hotda/filtration.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "hotda/error.hpp"

namespace hotda {

bool filtration_less(const FilteredSimplex& a, const FilteredSimplex& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  for (std::size_t i = 0; i <= a.dim; ++i) {
    if (a.vertex[i] != b.vertex[i]) return a.vertex[i] < b.vertex[i];
  }
  return false;
}

std::size_t FilteredComplex::count(std::size_t dim) const {
  return static_cast<std::size_t>(std::count_if(
      simplices.begin(), simplices.end(), [dim](const FilteredSimplex& s) { return s.dim == dim; }));
}

namespace {

class AdjacencyBits {
 public:
  explicit AdjacencyBits(std::size_t n) : words_((n + 63) / 64), bits_(n * words_, 0) {}

  void set(std::size_t i, std::size_t j) { bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64); }
  bool test(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + j / 64] >> (j % 64)) & 1U;
  }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace

FilteredComplex build_rips(const DistanceMatrix& d, const RipsOptions& options) {
  if (options.max_dim < 1 || options.max_dim > kMaxSimplexDim) {
    throw Error(ErrorCode::InvalidArgument, "max_dim must be in [1, 3]");
  }
  if (!(options.max_eps > 0.0 && options.max_eps <= 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "max_eps must be in (0, 2]");
  }
  if (d.n > std::numeric_limits<VertexId>::max()) {
    throw Error(ErrorCode::InvalidArgument, "too many vertices");
  }
  const std::size_t cap = std::min<std::size_t>(options.max_simplices,
                                                std::numeric_limits<SimplexIndex>::max() - 1);

  const std::size_t n = d.n;
  const double eps = options.max_eps;

  FilteredComplex complex;
  complex.n_vertices = n;
  complex.max_dim = options.max_dim;
  complex.max_eps = eps;
  auto& out = complex.simplices;

  auto push = [&](const FilteredSimplex& s) {
    if (out.size() >= cap) {
      throw Error(ErrorCode::ComplexTooLarge,
                  "more than " + std::to_string(cap) +
                      " simplices; reduce max_eps or max_dim");
    }
    out.push_back(s);
  };

  // Upper neighbor lists: for each i, the j > i with w(i, j) <= eps.
  std::vector<std::vector<VertexId>> upper(n);
  AdjacencyBits adjacent(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (d(i, j) <= eps) {
        upper[i].push_back(static_cast<VertexId>(j));
        adjacent.set(i, j);
        adjacent.set(j, i);
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    FilteredSimplex s;
    s.vertex[0] = static_cast<VertexId>(i);
    push(s);
  }

  std::vector<VertexId> common;
  for (std::size_t i = 0; i < n; ++i) {
    for (VertexId j : upper[i]) {
      FilteredSimplex edge;
      edge.dim = 1;
      edge.vertex = {static_cast<VertexId>(i), j, 0, 0};
      edge.value = d(i, j);
      push(edge);
      if (options.max_dim < 2) continue;

      // higher neighbors shared by i and j, ascending
      common.clear();
      for (VertexId k : upper[j]) {
        if (adjacent.test(i, k)) common.push_back(k);
      }
      for (std::size_t a = 0; a < common.size(); ++a) {
        const VertexId k = common[a];
        FilteredSimplex tri;
        tri.dim = 2;
        tri.vertex = {static_cast<VertexId>(i), j, k, 0};
        tri.value = std::max({edge.value, d(i, k), d(j, k)});
        push(tri);
        if (options.max_dim < 3) continue;
        for (std::size_t b = a + 1; b < common.size(); ++b) {
          const VertexId l = common[b];
          if (!adjacent.test(k, l)) continue;
          FilteredSimplex tet;
          tet.dim = 3;
          tet.vertex = {static_cast<VertexId>(i), j, k, l};
          tet.value = std::max({tri.value, d(i, l), d(j, l), d(k, l)});
          push(tet);
        }
      }
    }
  }

  std::sort(out.begin(), out.end(), filtration_less);
  return complex;
}

void write_complex(std::ostream& out, const FilteredComplex& complex) {
  char buf[32];
  for (const auto& s : complex.simplices) {
    std::snprintf(buf, sizeof(buf), "%.17g", s.value);
    out << buf << ' ' << int{s.dim};
    for (VertexId v : s.vertices()) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace hotda
