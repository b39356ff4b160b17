#include "hotda/persistence.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "hotda/error.hpp"
#include "simplex_lookup.hpp"

namespace hotda {

namespace {

using detail::kNoSimplex;
using Column = std::vector<SimplexIndex>;

/// a <- a xor b for ascending index lists.
void add_column(Column& a, const Column& b, Column& scratch) {
  scratch.clear();
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(scratch));
  a.swap(scratch);
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void attach(std::size_t child_root, std::size_t parent_root) { parent_[child_root] = parent_root; }

 private:
  std::vector<std::size_t> parent_;
};

/// Filtration positions of the cofaces of `s`, ascending.
void coboundary(const FilteredSimplex& s, std::size_t n_vertices,
                const detail::SimplexLookup& lookup, Column& out) {
  out.clear();
  const auto verts = s.vertices();
  std::array<VertexId, kMaxSimplexDim + 1> buf{};
  const std::size_t k = verts.size();
  std::size_t pos = 0;  // number of simplex vertices below u
  for (std::size_t u = 0; u < n_vertices; ++u) {
    if (pos < k && verts[pos] == u) {
      ++pos;
      continue;
    }
    std::copy(verts.begin(), verts.begin() + pos, buf.begin());
    buf[pos] = static_cast<VertexId>(u);
    std::copy(verts.begin() + pos, verts.end(), buf.begin() + pos + 1);
    const SimplexIndex idx = lookup.find({buf.data(), k + 1});
    if (idx != kNoSimplex) out.push_back(idx);
  }
  std::sort(out.begin(), out.end());
}

}  // namespace

FiltrationPairing compute_pairing(const FilteredComplex& complex) {
  const std::size_t hom_dims = complex.max_dim;  // H_0 .. H_{max_dim - 1}
  const auto& simplices = complex.simplices;
  const std::size_t m = simplices.size();

  FiltrationPairing pairing;
  pairing.by_dim.resize(hom_dims);
  std::vector<bool> is_death(m, false);

  // H0: union-find on edges in filtration order, elder rule on vertex position.
  {
    std::vector<SimplexIndex> vertex_pos(complex.n_vertices, kNoSimplex);
    for (std::size_t idx = 0; idx < m; ++idx) {
      if (simplices[idx].dim == 0) vertex_pos[simplices[idx].vertex[0]] = static_cast<SimplexIndex>(idx);
    }
    UnionFind uf(complex.n_vertices);
    for (std::size_t idx = 0; idx < m; ++idx) {
      const auto& s = simplices[idx];
      if (s.dim != 1) continue;
      const std::size_t ra = uf.find(s.vertex[0]);
      const std::size_t rb = uf.find(s.vertex[1]);
      if (ra == rb) continue;
      const bool a_older = vertex_pos[ra] < vertex_pos[rb];
      const std::size_t elder = a_older ? ra : rb;
      const std::size_t younger = a_older ? rb : ra;
      pairing.by_dim[0].push_back({vertex_pos[younger], static_cast<SimplexIndex>(idx)});
      is_death[idx] = true;
      uf.attach(younger, elder);
    }
    for (std::size_t v = 0; v < complex.n_vertices; ++v) {
      if (uf.find(v) == v) pairing.by_dim[0].push_back({vertex_pos[v], FiltrationPairing::kNoDeath});
    }
  }
  if (hom_dims < 2) return pairing;

  const detail::SimplexLookup lookup(complex);
  std::vector<SimplexIndex> pivot_owner(m, kNoSimplex);
  std::vector<Column> reduced;
  Column column;
  Column scratch;

  for (std::size_t dim = 1; dim < hom_dims; ++dim) {
    reduced.clear();
    auto& out = pairing.by_dim[dim];
    // Reverse filtration order; columns already paired as deaths are cleared.
    for (std::size_t r = m; r-- > 0;) {
      const auto& s = simplices[r];
      if (s.dim != dim || is_death[r]) continue;

      coboundary(s, complex.n_vertices, lookup, column);
      while (!column.empty()) {
        const SimplexIndex pivot = column.front();
        const SimplexIndex owner = pivot_owner[pivot];
        if (owner == kNoSimplex) break;
        add_column(column, reduced[owner], scratch);
      }
      if (column.empty()) {
        out.push_back({static_cast<SimplexIndex>(r), FiltrationPairing::kNoDeath});
        continue;
      }
      const SimplexIndex pivot = column.front();
      pivot_owner[pivot] = static_cast<SimplexIndex>(reduced.size());
      is_death[pivot] = true;
      out.push_back({static_cast<SimplexIndex>(r), pivot});
      reduced.push_back(column);
    }
  }
  return pairing;
}

PersistenceDiagram compute_persistence(const FilteredComplex& complex) {
  const FiltrationPairing pairing = compute_pairing(complex);
  PersistenceDiagram diagram;
  diagram.max_eps = complex.max_eps;
  diagram.max_hom_dim = complex.max_dim - 1;
  for (std::size_t dim = 0; dim < pairing.by_dim.size(); ++dim) {
    for (const auto& ip : pairing.by_dim[dim]) {
      PersistencePair p;
      p.dim = dim;
      p.birth = complex.simplices[ip.birth].value;
      p.birth_simplex = ip.birth;
      if (ip.death != FiltrationPairing::kNoDeath) {
        p.death = complex.simplices[ip.death].value;
        p.death_simplex = ip.death;
        if (!(p.birth < p.death)) continue;
      }
      diagram.pairs.push_back(p);
    }
  }
  std::sort(diagram.pairs.begin(), diagram.pairs.end(),
            [](const PersistencePair& a, const PersistencePair& b) {
              if (a.dim != b.dim) return a.dim < b.dim;
              if (a.birth != b.birth) return a.birth < b.birth;
              if (a.death != b.death) return a.death < b.death;
              return a.birth_simplex < b.birth_simplex;
            });
  return diagram;
}

std::vector<PersistencePair> PersistenceDiagram::in_dim(std::size_t dim) const {
  std::vector<PersistencePair> out;
  for (const auto& p : pairs) {
    if (p.dim == dim) out.push_back(p);
  }
  return out;
}

std::size_t PersistenceDiagram::live_count(std::size_t dim, double t) const {
  return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [&](const auto& p) {
    return p.dim == dim && p.alive_at(t);
  }));
}

PersistenceDiagram truncate_essential(const PersistenceDiagram& diagram) {
  PersistenceDiagram out = diagram;
  for (auto& p : out.pairs) {
    if (p.essential()) p.death = diagram.max_eps;
  }
  return out;
}

void write_diagram_csv(const std::filesystem::path& path, const PersistenceDiagram& diagram) {
  std::vector<PersistencePair> pairs = diagram.pairs;
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death;
  });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "dim,birth,death\n";
  char buf[64];
  for (const auto& p : pairs) {
    if (p.essential()) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,inf\n", p.dim, p.birth);
    } else {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", p.dim, p.birth, p.death);
    }
    out << buf;
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

PersistenceDiagram read_diagram_csv(const std::filesystem::path& path, std::string subject_id,
                                    double max_eps) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open diagram " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("dim,birth,death", 0) != 0) {
    throw Error(ErrorCode::ParseError, path.string() + ": missing 'dim,birth,death' header");
  }
  PersistenceDiagram diagram;
  diagram.subject_id = std::move(subject_id);
  diagram.max_eps = max_eps;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw Error(ErrorCode::ParseError, path.string() + " line " + std::to_string(line_no));
    }
    PersistencePair p;
    const std::string_view sv(line);
    auto parse = [&](std::string_view cell, auto& value) {
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::ParseError, path.string() + " line " + std::to_string(line_no));
      }
    };
    parse(sv.substr(0, c1), p.dim);
    parse(sv.substr(c1 + 1, c2 - c1 - 1), p.birth);
    const std::string_view death = sv.substr(c2 + 1);
    if (death == "inf") {
      p.death = kInfinity;
    } else {
      parse(death, p.death);
    }
    diagram.max_hom_dim = std::max(diagram.max_hom_dim, p.dim);
    diagram.pairs.push_back(p);
  }
  return diagram;
}

}  // namespace hotda
