#include "hotda/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include <boost/math/distributions/students_t.hpp>

#include "hotda/error.hpp"

namespace hotda {

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // sample variance, denominator n - 1
};

Moments moments(std::span<const double> x) {
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= static_cast<double>(x.size() - 1);
  return m;
}

}  // namespace

TTestResult group_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "each group needs at least 2 values");
  }
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = ma.var / na;
  const double vb = mb.var / nb;
  const double diff = ma.mean - mb.mean;

  TTestResult r;
  if (va + vb == 0.0) {
    if (diff == 0.0) throw Error(ErrorCode::DegenerateGroups, "both groups constant with equal means");
    r.t = diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    r.df = na + nb - 2.0;
    return r;
  }
  r.t = diff / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  const boost::math::students_t dist(r.df);
  r.p = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))), 0.0, 1.0);
  return r;
}

TTestResult ttest_or_null(std::span<const double> a, std::span<const double> b) {
  try {
    return group_ttest(a, b);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateGroups) throw;
    return {0.0, 1.0, static_cast<double>(a.size() + b.size()) - 2.0};
  }
}

std::vector<double> betti_auc(const PersistenceDiagram& diagram, const std::set<std::size_t>& dims,
                              std::size_t n_bins, const Interval& range) {
  const std::size_t max_dim = dims.empty() ? 0 : *dims.rbegin();
  if (max_dim > 2) throw Error(ErrorCode::InvalidArgument, "dims must be within {0, 1, 2}");
  const auto curve = betti_curve(diagram, n_bins, range, max_dim);
  std::vector<double> out;
  for (std::size_t dim : dims) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_bins; ++i) sum += curve[dim * n_bins + i];
    out.push_back(range.width() * sum / static_cast<double>(n_bins));
  }
  return out;
}

GroupComparison make_comparison(std::string name, std::vector<GroupItem> items) {
  std::stable_sort(items.begin(), items.end(),
                   [](const GroupItem& x, const GroupItem& y) { return std::abs(x.t) > std::abs(y.t); });
  GroupComparison gc;
  gc.statistic_name = std::move(name);
  for (const auto& it : items) gc.ranking.push_back(it.id);
  gc.items = std::move(items);
  return gc;
}

GroupComparison rank_thresholds(std::span<const LabeledDiagram> cohort, std::size_t n_thresholds,
                                const std::set<std::size_t>& dims, const Interval& range) {
  if (n_thresholds < 1) throw Error(ErrorCode::InvalidArgument, "n_thresholds must be >= 1");
  const auto thresholds = sample_grid(range, n_thresholds);
  const std::size_t max_dim = dims.empty() ? 0 : *dims.rbegin();

  // counts[subject][threshold]
  std::vector<std::vector<double>> counts;
  std::vector<Label> labels;
  for (const auto& entry : cohort) {
    const auto curve = betti_curve(*entry.diagram, n_thresholds, range, max_dim);
    std::vector<double> total(n_thresholds, 0.0);
    for (std::size_t dim : dims) {
      for (std::size_t i = 0; i < n_thresholds; ++i) total[i] += curve[dim * n_thresholds + i];
    }
    counts.push_back(std::move(total));
    labels.push_back(entry.label);
  }
  if (std::count(labels.begin(), labels.end(), Label::Control) == 0 ||
      std::count(labels.begin(), labels.end(), Label::Case) == 0) {
    throw Error(ErrorCode::InvalidArgument, "cohort needs both labels");
  }

  std::vector<GroupItem> items;
  char id[32];
  for (std::size_t i = 0; i < n_thresholds; ++i) {
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t s = 0; s < counts.size(); ++s) {
      (labels[s] == Label::Control ? a : b).push_back(counts[s][i]);
    }
    const TTestResult r = ttest_or_null(a, b);
    std::snprintf(id, sizeof(id), "%.4f", thresholds[i]);
    GroupItem item{id, r.t, r.p, 0.0, 0.0};
    for (double v : a) item.mean_a += v / static_cast<double>(a.size());
    for (double v : b) item.mean_b += v / static_cast<double>(b.size());
    items.push_back(std::move(item));
  }
  std::string name = "live_bar_count_H";
  for (std::size_t dim : dims) name += std::to_string(dim);
  return make_comparison(std::move(name), std::move(items));
}

GroupComparison rank_nodes(std::span<const CohortRecord> cohort, double eps, std::size_t top_k) {
  if (cohort.empty()) throw Error(ErrorCode::InvalidArgument, "empty cohort");
  const std::size_t n = cohort.front().distance.n;
  std::vector<std::vector<double>> a(n);
  std::vector<std::vector<double>> b(n);
  for (const auto& rec : cohort) {
    if (rec.distance.n != n) throw Error(ErrorCode::DimensionMismatch, "subjects differ in region count");
    const auto count = node_participation(rec.distance, eps);
    for (std::size_t v = 0; v < n; ++v) {
      (rec.label == Label::Control ? a : b)[v].push_back(static_cast<double>(count[v]));
    }
  }
  if (a[0].empty() || b[0].empty()) throw Error(ErrorCode::InvalidArgument, "cohort needs both labels");

  std::vector<GroupItem> items;
  for (std::size_t v = 0; v < n; ++v) {
    const TTestResult r = ttest_or_null(a[v], b[v]);
    GroupItem item{std::to_string(v), r.t, r.p, 0.0, 0.0};
    for (double x : a[v]) item.mean_a += x / static_cast<double>(a[v].size());
    for (double x : b[v]) item.mean_b += x / static_cast<double>(b[v].size());
    items.push_back(std::move(item));
  }
  char name[64];
  std::snprintf(name, sizeof(name), "node_participation_eps%g", eps);
  GroupComparison gc = make_comparison(name, std::move(items));
  const std::size_t k = std::min(top_k, n);
  gc.items.resize(k);
  gc.ranking.resize(k);
  return gc;
}

std::vector<NodeVote> vote_nodes(std::span<const GroupComparison> rankings, std::size_t top_k) {
  if (rankings.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one ranking");
  std::map<std::string, NodeVote> tally;
  std::map<std::string, double> abs_t_sum;
  std::vector<std::string> first_seen;
  for (const auto& gc : rankings) {
    const std::size_t k = std::min(top_k, gc.items.size());
    for (std::size_t i = 0; i < k; ++i) {
      const auto& item = gc.items[i];
      auto [it, inserted] = tally.try_emplace(item.id, NodeVote{item.id, 0, 0.0});
      if (inserted) first_seen.push_back(item.id);
      ++it->second.votes;
      abs_t_sum[item.id] += std::abs(item.t);
    }
  }
  std::vector<NodeVote> out;
  for (const auto& id : first_seen) {
    NodeVote v = tally.at(id);
    v.mean_abs_t = abs_t_sum.at(id) / static_cast<double>(v.votes);
    out.push_back(v);
  }
  std::stable_sort(out.begin(), out.end(), [](const NodeVote& x, const NodeVote& y) {
    if (x.votes != y.votes) return x.votes > y.votes;
    return x.mean_abs_t > y.mean_abs_t;
  });
  return out;
}

}  // namespace hotda
