#include <algorithm>
#include <map>
#include <unordered_map>

#include "hotda/error.hpp"
#include "hotda/persistence.hpp"
#include "simplex_lookup.hpp"

namespace hotda {

namespace {

using detail::kNoSimplex;
using Chain = std::vector<SimplexIndex>;

void add_chain(Chain& a, const Chain& b, Chain& scratch) {
  scratch.clear();
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(scratch));
  a.swap(scratch);
}

/// Standard left-to-right boundary reduction restricted to one dimension's
/// negative columns. Positive columns reduce to zero and never act as reducers,
/// so skipping them leaves the negative columns' results unchanged.
class BoundaryReducer {
 public:
  BoundaryReducer(const FilteredComplex& complex, const detail::SimplexLookup& lookup,
                  std::vector<SimplexIndex> negatives, bool track_chains)
      : complex_(complex), lookup_(lookup), track_(track_chains) {
    std::sort(negatives.begin(), negatives.end());
    for (SimplexIndex col : negatives) {
      Chain r = boundary(col);
      Chain v{col};
      reduce(r, v);
      if (r.empty()) {
        throw Error(ErrorCode::InvalidArgument, "negative column reduced to zero; pairing is inconsistent");
      }
      low_owner_.emplace(r.back(), reduced_.size());
      column_of_.emplace(col, reduced_.size());
      reduced_.push_back(std::move(r));
      if (track_) chains_.push_back(std::move(v));
    }
  }

  const Chain& reduced_column(SimplexIndex col) const { return reduced_.at(column_of_.at(col)); }

  /// Chain whose boundary is zero, obtained by reducing a positive column.
  Chain cycle_through(SimplexIndex col) const {
    Chain r = boundary(col);
    Chain v{col};
    reduce(r, v);
    if (!r.empty()) {
      throw Error(ErrorCode::InvalidArgument, "creator column did not reduce to zero");
    }
    return v;
  }

 private:
  Chain boundary(SimplexIndex col) const {
    const auto& s = complex_.simplices[col];
    const auto verts = s.vertices();
    Chain out;
    if (s.dim == 0) return out;
    std::array<VertexId, kMaxSimplexDim + 1> face{};
    for (std::size_t drop = 0; drop < verts.size(); ++drop) {
      std::size_t w = 0;
      for (std::size_t i = 0; i < verts.size(); ++i) {
        if (i != drop) face[w++] = verts[i];
      }
      const SimplexIndex idx = lookup_.find({face.data(), w});
      if (idx == kNoSimplex) throw Error(ErrorCode::InvalidArgument, "complex is not face-closed");
      out.push_back(idx);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  void reduce(Chain& r, Chain& v) const {
    Chain scratch;
    while (!r.empty()) {
      const auto it = low_owner_.find(r.back());
      if (it == low_owner_.end()) break;
      add_chain(r, reduced_[it->second], scratch);
      if (track_) add_chain(v, chains_[it->second], scratch);
    }
  }

  const FilteredComplex& complex_;
  const detail::SimplexLookup& lookup_;
  bool track_;
  std::vector<Chain> reduced_;
  std::vector<Chain> chains_;
  std::unordered_map<SimplexIndex, std::size_t> low_owner_;
  std::unordered_map<SimplexIndex, std::size_t> column_of_;
};

std::vector<VertexId> vertices_of(const FilteredComplex& complex, const Chain& chain) {
  std::vector<VertexId> out;
  for (SimplexIndex idx : chain) {
    for (VertexId v : complex.simplices[idx].vertices()) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<CycleFootprint> cycle_footprints(const FilteredComplex& complex,
                                             const PersistenceDiagram& diagram,
                                             bool include_essential) {
  std::vector<const PersistencePair*> wanted;
  for (const auto& p : diagram.pairs) {
    if (p.dim < 1 || p.dim > 2) continue;
    if (p.essential() && !include_essential) continue;
    if (!p.birth_simplex || (!p.essential() && !p.death_simplex)) {
      throw Error(ErrorCode::MissingGenerators,
                  "diagram pairs carry no simplex indices; recompute from the complex");
    }
    wanted.push_back(&p);
  }
  if (wanted.empty()) return {};

  const FiltrationPairing pairing = compute_pairing(complex);
  const detail::SimplexLookup lookup(complex);

  // negatives[j] = j-simplices that destroy a (j-1)-class, zero persistence included
  auto negatives = [&](std::size_t j) {
    std::vector<SimplexIndex> out;
    if (j == 0 || j - 1 >= pairing.by_dim.size()) return out;
    for (const auto& ip : pairing.by_dim[j - 1]) {
      if (ip.death != FiltrationPairing::kNoDeath) out.push_back(ip.death);
    }
    return out;
  };

  std::map<std::size_t, BoundaryReducer> finite;     // keyed by column dimension k + 1
  std::map<std::size_t, BoundaryReducer> essential;  // keyed by column dimension k
  auto reducer = [&](std::map<std::size_t, BoundaryReducer>& cache, std::size_t j,
                     bool track) -> const BoundaryReducer& {
    auto it = cache.find(j);
    if (it == cache.end()) {
      it = cache.try_emplace(j, complex, lookup, negatives(j), track).first;
    }
    return it->second;
  };

  std::vector<CycleFootprint> out;
  out.reserve(wanted.size());
  for (const PersistencePair* p : wanted) {
    CycleFootprint fp;
    fp.dim = p->dim;
    fp.pair = *p;
    if (p->essential()) {
      const Chain cycle = reducer(essential, p->dim, true).cycle_through(*p->birth_simplex);
      fp.vertices = vertices_of(complex, cycle);
    } else {
      const Chain& cycle = reducer(finite, p->dim + 1, false).reduced_column(*p->death_simplex);
      if (cycle.empty() || cycle.back() != *p->birth_simplex) {
        throw Error(ErrorCode::InvalidArgument, "representative cycle does not match its pair");
      }
      fp.vertices = vertices_of(complex, cycle);
    }
    out.push_back(std::move(fp));
  }
  return out;
}

std::vector<std::size_t> node_participation(const DistanceMatrix& d, double eps,
                                            std::size_t max_simplices) {
  if (!(eps > 0.0 && eps <= 2.0)) throw Error(ErrorCode::InvalidArgument, "eps must be in (0, 2]");
  const FilteredComplex complex = build_rips(d, {3, eps, max_simplices});
  const PersistenceDiagram diagram = compute_persistence(complex);

  // Truncated at eps, the classes alive at eps are exactly the essential ones.
  PersistenceDiagram alive;
  alive.max_eps = diagram.max_eps;
  for (const auto& p : diagram.pairs) {
    if (p.essential() && p.dim >= 1) alive.pairs.push_back(p);
  }

  std::vector<std::size_t> count(d.n, 0);
  for (const auto& fp : cycle_footprints(complex, alive, true)) {
    for (VertexId v : fp.vertices) ++count[v];
  }
  return count;
}

}  // namespace hotda
