// Brute-force Betti numbers, used to check the reduction. Shares nothing with
// build_rips or compute_pairing: simplices come from plain subset enumeration
// and ranks from dense Gaussian elimination.

#include <algorithm>
#include <map>
#include <string>

#include "hotda/error.hpp"
#include "hotda/persistence.hpp"

namespace hotda {

namespace {

using Tuple = std::vector<std::size_t>;

class BitMatrix {
 public:
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_((cols + 63) / 64), bits_(rows * words_, 0) {}

  void set(std::size_t r, std::size_t c) { bits_[r * words_ + c / 64] |= std::uint64_t{1} << (c % 64); }
  bool test(std::size_t r, std::size_t c) const { return (bits_[r * words_ + c / 64] >> (c % 64)) & 1U; }

  std::size_t rank() {
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
      std::size_t pivot = rank;
      while (pivot < rows_ && !test(pivot, c)) ++pivot;
      if (pivot == rows_) continue;
      swap_rows(pivot, rank);
      for (std::size_t r = rank + 1; r < rows_; ++r) {
        if (test(r, c)) xor_rows(r, rank);
      }
      ++rank;
    }
    return rank;
  }

 private:
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap_ranges(bits_.begin() + a * words_, bits_.begin() + (a + 1) * words_,
                     bits_.begin() + b * words_);
  }
  void xor_rows(std::size_t target, std::size_t source) {
    for (std::size_t w = 0; w < words_; ++w) bits_[target * words_ + w] ^= bits_[source * words_ + w];
  }

  std::size_t rows_;
  std::size_t cols_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

// rank of the boundary map from k-simplices to (k-1)-simplices
std::size_t boundary_rank(const std::vector<Tuple>& faces, const std::vector<Tuple>& cells) {
  if (faces.empty() || cells.empty()) return 0;
  std::map<Tuple, std::size_t> face_row;
  for (std::size_t i = 0; i < faces.size(); ++i) face_row.emplace(faces[i], i);

  BitMatrix m(faces.size(), cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t drop = 0; drop < cells[c].size(); ++drop) {
      Tuple face;
      for (std::size_t i = 0; i < cells[c].size(); ++i) {
        if (i != drop) face.push_back(cells[c][i]);
      }
      m.set(face_row.at(face), c);
    }
  }
  return m.rank();
}

}  // namespace

std::array<std::size_t, 3> betti_oracle(const DistanceMatrix& d, double eps, std::size_t max_dim,
                                        std::size_t max_simplices) {
  if (max_dim < 1 || max_dim > 3) throw Error(ErrorCode::InvalidArgument, "max_dim must be in [1, 3]");
  const std::size_t n = d.n;
  std::vector<std::vector<Tuple>> cells(max_dim + 1);
  std::size_t total = 0;

  auto admit = [&](const Tuple& t) {
    for (std::size_t a = 0; a < t.size(); ++a) {
      for (std::size_t b = a + 1; b < t.size(); ++b) {
        if (!(d(t[a], t[b]) <= eps)) return false;
      }
    }
    return true;
  };
  auto add = [&](Tuple t) {
    if (++total > max_simplices) {
      throw Error(ErrorCode::OracleTooLarge,
                  "more than " + std::to_string(max_simplices) + " simplices at eps");
    }
    cells[t.size() - 1].push_back(std::move(t));
  };

  for (std::size_t a = 0; a < n; ++a) {
    add({a});
    for (std::size_t b = a + 1; b < n && max_dim >= 1; ++b) {
      if (!admit({a, b})) continue;
      add({a, b});
      for (std::size_t c = b + 1; c < n && max_dim >= 2; ++c) {
        if (!admit({a, b, c})) continue;
        add({a, b, c});
        for (std::size_t e = c + 1; e < n && max_dim >= 3; ++e) {
          if (admit({a, b, c, e})) add({a, b, c, e});
        }
      }
    }
  }

  // rank[k] = rank of the boundary from k-cells; rank[0] = 0
  std::vector<std::size_t> rank(max_dim + 2, 0);
  for (std::size_t k = 1; k <= max_dim; ++k) rank[k] = boundary_rank(cells[k - 1], cells[k]);

  std::array<std::size_t, 3> betti{0, 0, 0};
  for (std::size_t k = 0; k < 3 && k <= max_dim; ++k) {
    betti[k] = cells[k].size() - rank[k] - rank[k + 1];
  }
  return betti;
}

}  // namespace hotda
