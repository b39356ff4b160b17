#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hotda/ingest.hpp"
#include "hotda/persistence.hpp"
#include "hotda/vectorize.hpp"

namespace hotda {

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  double df = 0.0;
};

/// Welch two-sample t-test, two-sided. t > 0 when mean(a) > mean(b).
/// Two constant groups with different means give t = +/-inf and p = 0.
TTestResult group_ttest(std::span<const double> a, std::span<const double> b);

struct GroupItem {
  std::string id;
  double t = 0.0;
  double p = 1.0;
  double mean_a = 0.0;  // label 0
  double mean_b = 0.0;  // label 1
};

struct GroupComparison {
  std::string statistic_name;
  std::vector<GroupItem> items;     // in ranking order
  std::vector<std::string> ranking;  // ids by |t| descending
};

/// Riemann sum over the cell-centered grid: width * mean of sampled beta_k.
std::vector<double> betti_auc(const PersistenceDiagram& diagram, const std::set<std::size_t>& dims,
                              std::size_t n_bins, const Interval& range = {});

struct LabeledDiagram {
  const PersistenceDiagram* diagram;
  Label label;
};

/// Per-subject statistic at each threshold is the summed live-bar count over
/// `dims` (default H1 + H2); thresholds are the cell centers of `range`.
GroupComparison rank_thresholds(std::span<const LabeledDiagram> cohort, std::size_t n_thresholds,
                                const std::set<std::size_t>& dims = {1, 2},
                                const Interval& range = {});

/// Per-node t-test of node_participation counts at eps; top_k clamped to N.
GroupComparison rank_nodes(std::span<const CohortRecord> cohort, double eps, std::size_t top_k);

struct NodeVote {
  std::string id;
  std::size_t votes = 0;
  double mean_abs_t = 0.0;
};

/// One vote per appearance in a ranking's top_k; ties broken by mean |t|.
std::vector<NodeVote> vote_nodes(std::span<const GroupComparison> rankings, std::size_t top_k);

/// Ranks `items` by |t| descending (stable), filling `ranking`.
GroupComparison make_comparison(std::string name, std::vector<GroupItem> items);

/// group_ttest, except degenerate groups (both constant and equal) map to t = 0, p = 1.
TTestResult ttest_or_null(std::span<const double> a, std::span<const double> b);

}  // namespace hotda
