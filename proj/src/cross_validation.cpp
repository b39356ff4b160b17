#include <algorithm>
#include <numeric>

#include "hotda/classify.hpp"
#include "hotda/error.hpp"
#include "hotda/rng.hpp"

namespace hotda {

Confusion confusion_of(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw Error(ErrorCode::DimensionMismatch, "label vectors differ in length");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      (predicted[i] == 1 ? c.tp : c.fn) += 1;
    } else {
      (predicted[i] == 1 ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

Metrics metrics_from(const Confusion& c) {
  Metrics m;
  m.confusion = c;
  const double tp = static_cast<double>(c.tp);
  const std::size_t total = c.tp + c.tn + c.fp + c.fn;
  m.accuracy = total ? static_cast<double>(c.tp + c.tn) / static_cast<double>(total) : 0.0;
  m.precision = (c.tp + c.fp) ? tp / static_cast<double>(c.tp + c.fp) : 0.0;
  m.recall = (c.tp + c.fn) ? tp / static_cast<double>(c.tp + c.fn) : 0.0;
  m.f1 = c.tp ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2");
  std::vector<std::size_t> fold_of(labels.size(), 0);
  Rng rng(seed);
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    if (members.size() < k) {
      throw Error(ErrorCode::TooFewSamples, "class " + std::to_string(cls) + " has " +
                                                std::to_string(members.size()) + " samples, fewer than k = " +
                                                std::to_string(k));
    }
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t pos = 0; pos < members.size(); ++pos) fold_of[members[pos]] = pos % k;
  }
  return fold_of;
}

EvalReport kfold_cv(const ClassifierSpec& spec, const Eigen::MatrixXd& x, std::span<const int> labels,
                    std::size_t k, std::uint64_t seed) {
  if (static_cast<Eigen::Index>(labels.size()) != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "label count does not match sample count");
  }
  EvalReport report;
  report.spec = spec;
  report.k = k;
  report.seed = seed;
  report.fold_of = stratified_folds(labels, k, seed);

  Confusion total;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<Eigen::Index> train_idx;
    std::vector<Eigen::Index> test_idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      (report.fold_of[i] == f ? test_idx : train_idx).push_back(static_cast<Eigen::Index>(i));
    }
    const Eigen::MatrixXd x_train = x(train_idx, Eigen::all);
    const Eigen::MatrixXd x_test = x(test_idx, Eigen::all);
    std::vector<int> y_train;
    std::vector<int> y_test;
    for (auto i : train_idx) y_train.push_back(labels[static_cast<std::size_t>(i)]);
    for (auto i : test_idx) y_test.push_back(labels[static_cast<std::size_t>(i)]);

    const TrainedModel model = train(spec, x_train, y_train);
    const Prediction pred = predict(model, x_test);

    FoldReport fr;
    fr.fold = f;
    fr.n_train = train_idx.size();
    fr.n_test = test_idx.size();
    fr.metrics = metrics_from(confusion_of(y_test, pred.labels));
    total.tp += fr.metrics.confusion.tp;
    total.tn += fr.metrics.confusion.tn;
    total.fp += fr.metrics.confusion.fp;
    total.fn += fr.metrics.confusion.fn;
    report.folds.push_back(fr);
  }

  const double kk = static_cast<double>(k);
  report.mean.confusion = total;
  for (const auto& fr : report.folds) {
    report.mean.accuracy += fr.metrics.accuracy / kk;
    report.mean.precision += fr.metrics.precision / kk;
    report.mean.recall += fr.metrics.recall / kk;
    report.mean.f1 += fr.metrics.f1 / kk;
  }
  return report;
}

}  // namespace hotda
