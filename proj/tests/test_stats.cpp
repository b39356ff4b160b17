#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hotda/error.hpp"
#include "hotda/stats.hpp"
#include "test_util.hpp"

using namespace hotda;

namespace {

// Two-sided tail of Student's t by Simpson integration of the density on [0, |t|].
double two_sided_p(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * std::numbers::pi);
  auto pdf = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const int n = 20000;
  const double h = std::abs(t) / n;
  double s = pdf(0) + pdf(std::abs(t));
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * pdf(i * h);
  return 1.0 - 2.0 * s * h / 3.0;
}

PersistenceDiagram one_bar(std::size_t dim, double b, double d) {
  PersistenceDiagram diag;
  diag.pairs.push_back({dim, b, d, std::nullopt, std::nullopt});
  return diag;
}

std::vector<PersistenceDiagram> diagrams_of(const std::vector<CohortRecord>& cohort) {
  std::vector<PersistenceDiagram> out;
  for (const auto& r : cohort) out.push_back(compute_persistence(build_rips(r.distance, {3, 2.0})));
  return out;
}

std::vector<LabeledDiagram> labeled(const std::vector<PersistenceDiagram>& diags, const std::vector<CohortRecord>& cohort) {
  std::vector<LabeledDiagram> out;
  for (std::size_t i = 0; i < diags.size(); ++i) out.push_back({&diags[i], cohort[i].label});
  return out;
}

}  // namespace

TEST_CASE("Betti AUC") {
  CHECK(std::abs(betti_auc(one_bar(1, 0.5, 1.5), {1}, 100)[0] - 1.0) <= 0.02);
  CHECK(betti_auc(one_bar(1, 0.5, 1.5), {0, 2}, 100) == std::vector<double>{0.0, 0.0});
  auto two = one_bar(1, 0.0, 1.0);
  two.pairs.push_back({1, 1.0, 2.0, std::nullopt, std::nullopt});
  CHECK(std::abs(betti_auc(two, {1}, 100)[0] - 2.0) <= 0.04);

  const auto d = synth_point_cloud(Shape::Circle, 20, 0.1, 8);
  const auto diag = compute_persistence(build_rips(d, {3, 2.0}));
  const auto auc = betti_auc(diag, {0, 1, 2}, 100);
  const auto curve = betti_curve(diag, 100, {});
  for (std::size_t k = 0; k < 3; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 100; ++i) mean += curve[k * 100 + i] / 100.0;
    CHECK(auc[k] == doctest::Approx(2.0 * mean).epsilon(1e-12));
  }
  CHECK_THROWS_AS(betti_auc(diag, {3}, 100), Error);
}

TEST_CASE("Welch t-test values") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{2, 3, 4, 5, 6};
  const auto r = group_ttest(a, b);
  CHECK(r.t == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r.df == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(r.p == doctest::Approx(0.3466).epsilon(1e-3));
  CHECK(r.p == doctest::Approx(two_sided_p(r.t, r.df)).epsilon(1e-8));

  const auto same = group_ttest(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == doctest::Approx(1.0));

  // unequal variances and sizes: compare against hand-coded Welch formulas
  const std::vector<double> x{0.3, 1.9, 2.2, 0.4, 5.1, 3.3, 2.0};
  const std::vector<double> y{4.0, 4.4, 3.9, 4.1};
  auto mean_var = [](const std::vector<double>& v) {
    double m = 0, s = 0;
    for (double e : v) m += e / static_cast<double>(v.size());
    for (double e : v) s += (e - m) * (e - m) / static_cast<double>(v.size() - 1);
    return std::pair{m, s};
  };
  const auto [mx, vx] = mean_var(x);
  const auto [my, vy] = mean_var(y);
  const double se2 = vx / 7 + vy / 4;
  const double t = (mx - my) / std::sqrt(se2);
  const double df = se2 * se2 / ((vx / 7) * (vx / 7) / 6 + (vy / 4) * (vy / 4) / 3);
  const auto w = group_ttest(x, y);
  CHECK(w.t == doctest::Approx(t).epsilon(1e-12));
  CHECK(w.df == doctest::Approx(df).epsilon(1e-12));
  CHECK(w.p == doctest::Approx(two_sided_p(t, df)).epsilon(1e-7));
}

TEST_CASE("Welch t-test properties and degenerate inputs") {
  const std::vector<double> a{0.1, 0.7, 0.2, 0.9, 0.4};
  const std::vector<double> b{1.1, 0.3, 1.7, 0.8};
  const auto ab = group_ttest(a, b);
  const auto ba = group_ttest(b, a);
  CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-14));
  CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-14));
  std::vector<double> a3 = a, b3 = b;
  for (double& v : a3) v *= 3.7;
  for (double& v : b3) v *= 3.7;
  CHECK(group_ttest(a3, b3).t == doctest::Approx(ab.t).epsilon(1e-12));
  CHECK((ab.p >= 0.0 && ab.p <= 1.0));

  const std::vector<double> zeros{0, 1e-9, 0, -1e-9};
  const std::vector<double> ones{1, 1 + 1e-9, 1, 1 - 1e-9};
  const auto sep = group_ttest(zeros, ones);
  CHECK(sep.t < -1e6);
  CHECK(sep.p < 1e-12);

  const std::vector<double> c0{2, 2, 2};
  const std::vector<double> c1{3, 3};
  const auto inf = group_ttest(c1, c0);
  CHECK(inf.t == kInfinity);
  CHECK(inf.p == 0.0);
  try {
    group_ttest(c0, c0);
    FAIL("expected DegenerateGroups");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateGroups);
  }
  CHECK(ttest_or_null(c0, c0).p == 1.0);
  CHECK(ttest_or_null(c0, c0).t == 0.0);
  CHECK_THROWS_AS(group_ttest(std::vector<double>{1.0}, b), Error);
}

TEST_CASE("threshold ranking on identical and on different classes") {
  const auto same = synth_cohort(8, {Shape::Circle, 20, 0.05}, {Shape::Circle, 20, 0.05}, 3);
  const auto ds = diagrams_of(same);
  const auto ls = labeled(ds, same);
  const auto flat = rank_thresholds(ls, 100);
  CHECK(flat.items.size() == 100);
  CHECK(flat.ranking.size() == 100);
  CHECK(flat.statistic_name == "live_bar_count_H12");
  for (const auto& it : flat.items) CHECK(it.p >= 0.05);

  const auto mixed = synth_cohort(10, {Shape::Circle, 30, 0.05}, {Shape::UniformNoise, 30, 0.05}, 5);
  const auto dm = diagrams_of(mixed);
  const auto lm = labeled(dm, mixed);
  const auto r = rank_thresholds(lm, 100);
  bool found = false;
  for (const auto& it : r.items) found = found || (it.p < 0.05 && it.mean_a > it.mean_b);
  CHECK(found);
  for (std::size_t i = 1; i < r.items.size(); ++i) CHECK(std::abs(r.items[i - 1].t) >= std::abs(r.items[i].t));
  std::vector<std::string> ids = r.ranking;
  std::sort(ids.begin(), ids.end());
  CHECK(std::unique(ids.begin(), ids.end()) == ids.end());

  const auto again = rank_thresholds(lm, 100);
  CHECK(again.ranking == r.ranking);
  CHECK(rank_thresholds(lm, 10, {1}).items.size() == 10);

  std::vector<LabeledDiagram> one_label(lm.begin(), lm.end());
  for (auto& l : one_label) l.label = Label::Case;
  CHECK_THROWS_AS(rank_thresholds(one_label, 10), Error);
}

TEST_CASE("node ranking recovers a planted cycle") {
  const auto cohort = test_util::planted_cohort(12, 16, 1);
  const auto gc = rank_nodes(cohort, 0.3, 6);
  REQUIRE(gc.items.size() == 6);
  std::vector<std::string> top4(gc.ranking.begin(), gc.ranking.begin() + 4);
  std::sort(top4.begin(), top4.end());
  CHECK(top4 == std::vector<std::string>{"0", "1", "2", "3"});
  for (std::size_t i = 0; i < 4; ++i) CHECK(gc.items[i].t > 0.0);
  CHECK(rank_nodes(cohort, 0.3, 100).items.size() == 16);
}

TEST_CASE("node ranking on identical classes") {
  auto cohort = test_util::planted_cohort(4, 10, 2);
  for (std::size_t i = 1; i < cohort.size(); i += 2) cohort[i].distance = cohort[i - 1].distance;
  const auto gc = rank_nodes(cohort, 0.3, 10);
  for (const auto& it : gc.items) CHECK(it.t == doctest::Approx(0.0));
}

TEST_CASE("node voting") {
  auto comparison = [](std::vector<std::pair<std::string, double>> items) {
    std::vector<GroupItem> gi;
    for (auto& [id, t] : items) gi.push_back({id, t, 0.01, 0.0, 0.0});
    return make_comparison("x", gi);
  };
  const auto single = comparison({{"a", 3.0}, {"b", -5.0}, {"c", 1.0}, {"d", 0.5}});
  const std::vector<GroupComparison> one{single};
  const auto v1 = vote_nodes(one, 2);
  REQUIRE(v1.size() == 2);
  CHECK(v1[0].id == "b");
  CHECK(v1[1].id == "a");

  const std::vector<GroupComparison> disjoint{comparison({{"a", 1.0}, {"b", 4.0}}), comparison({{"c", -3.0}, {"d", 2.0}})};
  const auto v2 = vote_nodes(disjoint, 10);
  REQUIRE(v2.size() == 4);
  std::vector<std::string> order;
  for (const auto& v : v2) {
    CHECK(v.votes == 1);
    order.push_back(v.id);
  }
  CHECK(order == std::vector<std::string>{"b", "c", "d", "a"});

  std::vector<GroupComparison> five;
  for (int i = 0; i < 5; ++i) {
    five.push_back(i < 3 ? comparison({{"x", 1.0}, {"y", 9.0}}) : comparison({{"x", 1.0}, {"z", 9.0}}));
  }
  const auto v3 = vote_nodes(five, 2);
  CHECK(v3[0].id == "x");
  CHECK(v3[0].votes == 5);
  CHECK(v3[1].id == "y");
  CHECK(v3[1].votes == 3);
  CHECK(v3[0].mean_abs_t == doctest::Approx(1.0));
  CHECK_THROWS_AS(vote_nodes(std::vector<GroupComparison>{}, 3), Error);
}
