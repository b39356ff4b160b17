#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hotda/vectorize.hpp"

namespace hotda {

enum class ClassifierKind { LogReg, Mlp, LinearSvm };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view name);

struct LogRegParams {
  double l2 = 1e-2;
  std::size_t max_iters = 500;
  double learning_rate = 0.1;
};

struct MlpParams {
  std::vector<std::size_t> hidden{256, 64, 16};
  double l2 = 1e-4;
  double learning_rate = 1e-2;
  std::size_t epochs = 300;
  std::uint64_t seed = 0;
};

/// Objective: mean hinge + ||w||^2 / (2 C n), which has the same minimizer as
/// the textbook 0.5 ||w||^2 + C * sum(hinge).
struct SvmParams {
  double C = 1.0;
  std::size_t epochs = 500;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
};

struct ClassifierSpec {
  std::string name;
  std::variant<LogRegParams, MlpParams, SvmParams> params;

  ClassifierKind kind() const { return static_cast<ClassifierKind>(params.index()); }
  void validate() const;
};

/// y = W x + b, W is (outputs x inputs).
struct DenseLayer {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

/// Per-coordinate z-scoring fitted on training rows; zero-variance columns are
/// centered but not scaled.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

struct TrainedModel {
  ClassifierSpec spec;
  std::vector<DenseLayer> layers;  // hidden layers then the single-logit output
  Standardizer standardizer;
  std::vector<double> loss_history;  // regularized loss, one entry per epoch

  std::size_t input_dim() const { return static_cast<std::size_t>(layers.front().weights.cols()); }
};

/// Rows are samples; one row per FeatureVector.
Eigen::MatrixXd to_matrix(std::span<const FeatureVector> features);

std::vector<DenseLayer> init_layers(const ClassifierSpec& spec, std::size_t input_dim);

/// Regularized training loss on already-standardized inputs; fills `grad`
/// (same shapes as `layers`) when non-null. Labels are 0/1.
double objective(const ClassifierSpec& spec, const std::vector<DenseLayer>& layers,
                 const Eigen::MatrixXd& x, std::span<const int> labels,
                 std::vector<DenseLayer>* grad = nullptr);

std::vector<double> flatten(const std::vector<DenseLayer>& layers);
void unflatten(std::span<const double> flat, std::vector<DenseLayer>& layers);

/// Full-batch gradient descent; the step is halved whenever it would raise the loss.
TrainedModel train(const ClassifierSpec& spec, const Eigen::MatrixXd& x, std::span<const int> labels);
TrainedModel train(const ClassifierSpec& spec, std::span<const FeatureVector> features,
                   std::span<const int> labels);

struct Prediction {
  std::vector<int> labels;
  std::vector<double> scores;  // class-1 probability, or sigmoid(margin) for the SVM
};

Prediction predict(const TrainedModel& model, const Eigen::MatrixXd& x);

/// Last hidden layer activations, one row per sample. MLP only.
Eigen::MatrixXd embed(const TrainedModel& model, const Eigen::MatrixXd& x);

struct Confusion {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion confusion;
};

Confusion confusion_of(std::span<const int> truth, std::span<const int> predicted);
/// Precision/recall are 0 when their denominator is 0; f1 is 0 when TP = 0.
Metrics metrics_from(const Confusion& c);

struct FoldReport {
  std::size_t fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  Metrics metrics;
};

struct EvalReport {
  ClassifierSpec spec;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_of;  // per sample
  std::vector<FoldReport> folds;
  Metrics mean;  // fold-averaged scores; confusion summed over folds
};

/// Stratified assignment: each class shuffled with `seed`, then dealt round-robin.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t k,
                                          std::uint64_t seed);

EvalReport kfold_cv(const ClassifierSpec& spec, const Eigen::MatrixXd& x, std::span<const int> labels,
                    std::size_t k, std::uint64_t seed);

}  // namespace hotda
