#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hotda/error.hpp"
#include "hotda/vectorize.hpp"
#include "test_util.hpp"

using namespace hotda;

namespace {

PersistenceDiagram bars(std::vector<std::array<double, 3>> dim_birth_death, double max_eps = 2.0) {
  PersistenceDiagram d;
  d.max_eps = max_eps;
  for (const auto& b : dim_birth_death) {
    d.pairs.push_back({static_cast<std::size_t>(b[0]), b[1], b[2], std::nullopt, std::nullopt});
  }
  return d;
}

// Range whose cell centers land on lo, lo + h, ..., hi.
Interval centered(double lo, double hi, std::size_t n) {
  const double h = (hi - lo) / static_cast<double>(n - 1);
  return {lo - h / 2, hi + h / 2};
}

double tent(double b, double d, double t) { return std::max(0.0, std::min(t - b, d - t)); }

const VectorizationConfig kDefaults{};

}  // namespace

TEST_CASE("sample grid uses cell centers") {
  const auto g = sample_grid({0.0, 2.0}, 4);
  CHECK(g == std::vector<double>{0.25, 0.75, 1.25, 1.75});
  const auto c = sample_grid(centered(0.0, 2.0, 5), 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(c[i] == doctest::Approx(0.5 * static_cast<double>(i)));
}

TEST_CASE("single-pair landscape is a tent") {
  const auto diag = bars({{1, 1.0, 2.0}});
  const Interval r = centered(0.0, 2.0, 5);
  const auto l = landscape(diag, 1, 5, r);
  REQUIRE(l.size() == 15);
  // dim 1 block, t = 0, .5, 1, 1.5, 2
  CHECK(l[5 + 2] == 0.0);
  CHECK(l[5 + 3] == doctest::Approx(0.5));
  CHECK(l[5 + 4] == doctest::Approx(0.0));
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(l[i] == 0.0);
    CHECK(l[10 + i] == 0.0);
  }

  // Default grid: peak within one bin of (b + d) / 2 and of height (d - b) / 2.
  const auto fine = landscape(diag, 1, 100, {});
  const auto peak = std::max_element(fine.begin() + 100, fine.begin() + 200);
  const double t_peak = sample_grid({}, 100)[static_cast<std::size_t>(peak - fine.begin() - 100)];
  CHECK(std::abs(t_peak - 1.5) <= 0.02);
  CHECK(std::abs(*peak - 0.5) <= 0.02);
}

TEST_CASE("second landscape layer") {
  const auto diag = bars({{0, 0.0, 2.0}, {0, 0.5, 1.5}});
  const Interval r = centered(0.0, 2.0, 5);
  const auto l = landscape(diag, 2, 5, r, 0);
  REQUIRE(l.size() == 10);
  CHECK(l[2] == doctest::Approx(1.0));
  CHECK(l[5 + 2] == doctest::Approx(0.5));
  const auto one = landscape(bars({{0, 0.5, 1.5}}), 3, 5, r, 0);
  for (std::size_t i = 5; i < 15; ++i) CHECK(one[i] == 0.0);
}

TEST_CASE("landscape layers are ordered and 1-Lipschitz") {
  const auto d = synth_point_cloud(Shape::Circle, 20, 0.1, 4);
  const auto diag = compute_persistence(build_rips(d, {3, 2.0}));
  const std::size_t n = 100;
  const std::size_t depth = 3;
  const auto l = landscape(diag, depth, n, {});
  const double h = 2.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t layer = 0; layer < depth; ++layer) {
        const double v = l[(k * depth + layer) * n + t];
        CHECK(v >= 0.0);
        if (layer > 0) CHECK(v <= l[(k * depth + layer - 1) * n + t]);
        if (t > 0) CHECK(std::abs(v - l[(k * depth + layer) * n + t - 1]) <= h + 1e-12);
      }
    }
  }
  // Direct evaluation of the first layer in dimension 1.
  const auto grid = sample_grid({}, n);
  const auto h1 = truncate_essential(diag).in_dim(1);
  for (std::size_t t = 0; t < n; ++t) {
    double best = 0.0;
    for (const auto& p : h1) best = std::max(best, tent(p.birth, p.death, grid[t]));
    CHECK(l[(1 * depth) * n + t] == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("Betti curve uses half-open intervals") {
  const auto diag = bars({{0, 0.0, 1.0}, {0, 0.5, 1.5}});
  const Interval r = centered(0.0, 2.0, 9);  // centers every 0.25
  const auto b = betti_curve(diag, 9, r, 0);
  CHECK(b[3] == 2.0);  // t = 0.75
  CHECK(b[4] == 1.0);  // t = 1.0, first interval already closed
  CHECK(b[6] == 0.0);  // t = 1.5
  CHECK(b[0] == 1.0);  // t = 0
}

TEST_CASE("square Betti curve in H1") {
  const auto diag = compute_persistence(build_rips(test_util::unit_square(), {3, 2.0}));
  const auto b = betti_curve(diag, 100, {});
  const auto grid = sample_grid({}, 100);
  for (std::size_t i = 0; i < 100; ++i) {
    const double expected = (grid[i] >= 1.0 && grid[i] < std::sqrt(2.0)) ? 1.0 : 0.0;
    CHECK(b[100 + i] == expected);
  }
}

TEST_CASE("Betti curve agrees with the oracle") {
  for (unsigned seed = 0; seed < 4; ++seed) {
    const auto d = test_util::random_cloud(7, 300 + seed);
    const auto diag = compute_persistence(build_rips(d, {3, 2.0}));
    const std::size_t n = 40;
    const auto curve = betti_curve(diag, n, {});
    const auto grid = sample_grid({}, n);
    for (std::size_t t = 0; t < n; ++t) {
      const auto beta = betti_oracle(d, grid[t]);
      for (std::size_t k = 0; k < 3; ++k) CHECK(curve[k * n + t] == static_cast<double>(beta[k]));
    }
  }
}

TEST_CASE("heat kernel") {
  const auto empty = heat_kernel(bars({}), 1.2, 10, {});
  CHECK(empty.size() == 300);
  CHECK(std::all_of(empty.begin(), empty.end(), [](double v) { return v == 0.0; }));

  const auto one = heat_kernel(bars({{1, 1.0, 1.5}}), 1.2, 10, {});
  const auto peak = std::max_element(one.begin() + 100, one.begin() + 200) - (one.begin() + 100);
  // nearest grid point to (1, 1.5): birth cell 4 or 5 (centers .9, 1.1), death cell 7 (center 1.5)
  CHECK((peak == 4 * 10 + 7 || peak == 5 * 10 + 7));

  // index = birth_cell * grid + death_cell, value = Gaussian density
  const double s = 0.3;
  const auto k = heat_kernel(bars({{0, 0.2, 0.6}}), s, 10, {}, 0);
  const auto g = sample_grid({}, 10);
  for (std::size_t bi = 0; bi < 10; ++bi) {
    for (std::size_t di = 0; di < 10; ++di) {
      const double r2 = (g[bi] - 0.2) * (g[bi] - 0.2) + (g[di] - 0.6) * (g[di] - 0.6);
      const double expected = std::exp(-r2 / (2 * s * s)) / (2 * std::numbers::pi * s * s);
      CHECK(k[bi * 10 + di] == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  // mass of one well-contained Gaussian
  const std::size_t grid = 100;
  const auto fine = heat_kernel(bars({{1, 0.8, 1.2}}), 0.1, grid, {});
  double mass = 0.0;
  for (std::size_t i = 0; i < grid * grid; ++i) mass += fine[grid * grid + i];
  mass *= (2.0 / grid) * (2.0 / grid);
  CHECK(std::abs(mass - 1.0) <= 0.02);
}

TEST_CASE("heat kernel is linear in the diagram") {
  const auto a = bars({{0, 0.0, 0.7}, {1, 0.4, 0.9}});
  const auto b = bars({{1, 0.5, 1.6}, {2, 1.0, 1.1}});
  auto both = a;
  both.pairs.insert(both.pairs.end(), b.pairs.begin(), b.pairs.end());
  const auto ka = heat_kernel(a, 1.4, 10, {});
  const auto kb = heat_kernel(b, 1.4, 10, {});
  const auto kab = heat_kernel(both, 1.4, 10, {});
  for (std::size_t i = 0; i < kab.size(); ++i) CHECK(kab[i] == doctest::Approx(ka[i] + kb[i]).epsilon(1e-12));
}

TEST_CASE("persistent entropy") {
  for (std::size_t n : {1u, 2u, 5u, 17u}) {
    std::vector<std::array<double, 3>> eq;
    for (std::size_t i = 0; i < n; ++i) eq.push_back({1, 0.1 * static_cast<double>(i), 0.1 * static_cast<double>(i) + 0.3});
    const auto e = persistent_entropy(bars(eq));
    CHECK(std::abs(e[1] - std::log(static_cast<double>(n))) <= 1e-12);
    CHECK(e[0] == 0.0);
    CHECK(e[2] == 0.0);
  }
  const auto mixed = persistent_entropy(bars({{0, 0, 0.1}, {0, 0, 0.5}, {0, 0, kInfinity}}));
  // essential bar uses death = max_eps = 2
  const double total = 0.1 + 0.5 + 2.0;
  double expected = 0.0;
  for (double l : {0.1, 0.5, 2.0}) expected -= (l / total) * std::log(l / total);
  CHECK(mixed[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(mixed[0] >= 0.0);
  CHECK(mixed[0] <= std::log(3.0));
}

TEST_CASE("lower-order features") {
  const auto d90 = synth_point_cloud(Shape::UniformNoise, 90, 0.0, 1);
  CHECK(lower_order(d90).size() == 4005);
  DistanceMatrix ones{"o", 4, std::vector<double>(16, 1.0)};
  for (std::size_t i = 0; i < 4; ++i) ones.at(i, i) = 0.0;
  const auto z = lower_order(ones);
  CHECK(z.size() == 6);
  CHECK(std::all_of(z.begin(), z.end(), [](double v) { return v == 0.0; }));
  ones.at(0, 1) = ones.at(1, 0) = 0.3;
  ones.at(2, 3) = ones.at(3, 2) = 1.5;
  const auto v = lower_order(ones);
  CHECK(v.front() == doctest::Approx(0.7));
  CHECK(v.back() == doctest::Approx(-0.5));
}

TEST_CASE("default layout for 90 regions") {
  const auto layout = feature_layout(kDefaults, 90);
  REQUIRE(layout.size() == 7);
  const std::vector<std::size_t> lengths{300, 600, 300, 300, 300, 3, 4005};
  const std::vector<std::string> names{"landscape_depth1",      "landscape_depth2",      "betti_curve",
                                       "heat_kernel_sigma1.2", "heat_kernel_sigma1.4", "persistent_entropy",
                                       "lower_order"};
  std::size_t offset = 0;
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(layout[i].name == names[i]);
    CHECK(layout[i].length == lengths[i]);
    CHECK(layout[i].offset == offset);
    offset += layout[i].length;
  }
  CHECK(offset == 5808);
  const auto ten = feature_layout(kDefaults, 10);
  CHECK(ten.back().offset + ten.back().length == 1848);
}

TEST_CASE("fuse places every part at its offset") {
  const auto d = synth_point_cloud(Shape::Circle, 12, 0.05, 3);
  const auto diag = compute_persistence(build_rips(d, {3, 2.0}));
  const auto parts = compute_parts(diag, d, kDefaults);
  const auto fv = fuse(parts, kDefaults);
  REQUIRE(fv.values.size() == 1800 + 3 + 66);
  std::vector<const std::vector<double>*> ordered;
  for (const auto& l : parts.landscapes) ordered.push_back(&l);
  ordered.push_back(&parts.betti);
  for (const auto& h : parts.heat) ordered.push_back(&h);
  ordered.push_back(&parts.entropy);
  ordered.push_back(&parts.lower);
  for (std::size_t s = 0; s < ordered.size(); ++s) {
    const auto& seg = fv.layout[s];
    REQUIRE(seg.length == ordered[s]->size());
    for (std::size_t i = 0; i < seg.length; ++i) CHECK(fv.values[seg.offset + i] == (*ordered[s])[i]);
  }
  CHECK(extract_features(diag, d, kDefaults).values == fv.values);

  auto broken = parts;
  broken.betti.pop_back();
  try {
    fuse(broken, kDefaults);
    FAIL("expected LayoutMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LayoutMismatch);
  }
  auto missing = parts;
  missing.heat.pop_back();
  CHECK_THROWS_AS(fuse(missing, kDefaults), Error);
}

TEST_CASE("empty diagrams give zero higher-order features") {
  PersistenceDiagram empty;
  const auto d = synth_point_cloud(Shape::Circle, 10, 0.0, 1);
  const auto fv = extract_features(empty, d, kDefaults);
  REQUIRE(fv.values.size() == 1848);
  for (std::size_t i = 0; i < 1803; ++i) CHECK(fv.values[i] == 0.0);
  CHECK(std::any_of(fv.values.begin() + 1803, fv.values.end(), [](double v) { return v != 0.0; }));
}

TEST_CASE("configuration validation") {
  VectorizationConfig c;
  c.n_bins = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.heat_sigmas = {0.0};
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.range = {1.0, 1.0};
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.heat_grid = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK_NOTHROW(VectorizationConfig{}.validate());
}
