#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "hotda/error.hpp"
#include "hotda/filtration.hpp"
#include "test_util.hpp"

using namespace hotda;

namespace {

DistanceMatrix constant(std::size_t n, double v) {
  DistanceMatrix d{"c", n, std::vector<double>(n * n, v)};
  for (std::size_t i = 0; i < n; ++i) d.at(i, i) = 0.0;
  return d;
}

// All vertex subsets of size <= max_dim + 1 with diameter <= eps, by bitmask.
std::size_t brute_count(const DistanceMatrix& d, std::size_t max_dim, double eps) {
  std::size_t count = 0;
  for (unsigned mask = 1; mask < (1u << d.n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > max_dim + 1) continue;
    double diam = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
      for (std::size_t j = i + 1; j < d.n; ++j) {
        if ((mask >> i & 1u) && (mask >> j & 1u)) diam = std::max(diam, d(i, j));
      }
    }
    count += diam <= eps ? 1 : 0;
  }
  return count;
}

std::vector<VertexId> key(const FilteredSimplex& s) {
  auto v = s.vertices();
  return {v.begin(), v.end()};
}

}  // namespace

TEST_CASE("equilateral triangle and tetrahedron") {
  const auto tri = build_rips(constant(3, 1.0), {2, 2.0});
  REQUIRE(tri.size() == 7);
  CHECK(tri.count(0) == 3);
  CHECK(tri.count(1) == 3);
  CHECK(tri.count(2) == 1);
  CHECK(tri.simplices.back().value == 1.0);
  CHECK(tri.simplices.back().dim == 2);

  const auto tet = build_rips(constant(4, 1.0), {3, 2.0});
  CHECK(tet.size() == 15);
  CHECK(tet.count(3) == 1);
}

TEST_CASE("complete complex counts are binomial coefficients") {
  const auto d = synth_point_cloud(Shape::UniformNoise, 30, 0.0, 4);
  const auto c = build_rips(d, {3, 2.0});
  CHECK(c.count(0) == 30);
  CHECK(c.count(1) == 435);
  CHECK(c.count(2) == 4060);
  CHECK(c.count(3) == 27405);
}

TEST_CASE("simplex count matches subset enumeration") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto d = test_util::random_cloud(9, seed);
    for (double eps : {0.2, 0.45, 0.7, 1.8}) {
      for (std::size_t k = 1; k <= 3; ++k) {
        CHECK(build_rips(d, {k, eps}).size() == brute_count(d, k, eps));
      }
    }
  }
}

TEST_CASE("filtration order, values and face closure") {
  const auto d = test_util::random_cloud(12, 21);
  const auto c = build_rips(d, {3, 0.9});
  std::set<std::vector<VertexId>> seen;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& s = c.simplices[i];
    const auto v = key(s);
    CHECK(std::is_sorted(v.begin(), v.end()));
    CHECK(std::adjacent_find(v.begin(), v.end()) == v.end());
    double diam = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) {
      for (std::size_t b = a + 1; b < v.size(); ++b) diam = std::max(diam, d(v[a], v[b]));
    }
    CHECK(s.value == diam);
    if (i > 0) CHECK(filtration_less(c.simplices[i - 1], s));
    if (s.dim > 0) {
      for (std::size_t drop = 0; drop < v.size(); ++drop) {
        auto face = v;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
        CHECK(seen.count(face) == 1);
      }
    }
    seen.insert(v);
  }
}

TEST_CASE("smaller thresholds give an order-preserving subset") {
  const auto d = test_util::random_cloud(10, 8);
  const auto big = build_rips(d, {3, 1.2});
  const auto small = build_rips(d, {3, 0.6});
  std::vector<std::vector<VertexId>> expected;
  for (const auto& s : big.simplices) {
    if (s.value <= 0.6) expected.push_back(key(s));
  }
  REQUIRE(expected.size() == small.size());
  for (std::size_t i = 0; i < small.size(); ++i) CHECK(key(small.simplices[i]) == expected[i]);
}

TEST_CASE("construction is deterministic and validates its options") {
  const auto d = test_util::random_cloud(10, 2);
  const auto a = build_rips(d, {3, 1.0});
  const auto b = build_rips(d, {3, 1.0});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(key(a.simplices[i]) == key(b.simplices[i]));

  CHECK_THROWS_AS(build_rips(d, {0, 1.0}), Error);
  CHECK_THROWS_AS(build_rips(d, {4, 1.0}), Error);
  CHECK_THROWS_AS(build_rips(d, {2, 0.0}), Error);
  CHECK_THROWS_AS(build_rips(d, {2, 2.5}), Error);
  try {
    build_rips(d, {3, 2.0, 100});
    FAIL("expected ComplexTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ComplexTooLarge);
  }
}

TEST_CASE("debug dump format") {
  const auto c = build_rips(constant(3, 1.0), {2, 2.0});
  std::ostringstream out;
  write_complex(out, c);
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "0 0 0");
  CHECK(lines[3] == "1 1 0 1");
  CHECK(lines[6] == "1 2 0 1 2");
}
