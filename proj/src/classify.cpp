#include "hotda/classify.hpp"

#include <algorithm>
#include <cmath>

#include "hotda/error.hpp"
#include "hotda/rng.hpp"

namespace hotda {

namespace {

constexpr double kMinScale = 1e-12;
constexpr double kMinLearningRate = 1e-12;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

Eigen::MatrixXd affine(const DenseLayer& layer, const Eigen::MatrixXd& in) {
  Eigen::MatrixXd z = in * layer.weights.transpose();
  z.rowwise() += layer.bias.transpose();
  return z;
}

double l2_strength(const ClassifierSpec& spec, std::size_t n_samples) {
  switch (spec.kind()) {
    case ClassifierKind::LogReg: return std::get<LogRegParams>(spec.params).l2;
    case ClassifierKind::Mlp: return std::get<MlpParams>(spec.params).l2;
    case ClassifierKind::LinearSvm:
      return 1.0 / (std::get<SvmParams>(spec.params).C * static_cast<double>(n_samples));
  }
  return 0.0;
}

void check_labels(std::span<const int> labels, Eigen::Index rows) {
  if (static_cast<Eigen::Index>(labels.size()) != rows) {
    throw Error(ErrorCode::DimensionMismatch, "label count does not match sample count");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
  }
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::LogReg: return "logreg";
    case ClassifierKind::Mlp: return "mlp";
    case ClassifierKind::LinearSvm: return "linear_svm";
  }
  return "unknown";
}

ClassifierKind parse_classifier_kind(std::string_view name) {
  if (name == "logreg") return ClassifierKind::LogReg;
  if (name == "mlp") return ClassifierKind::Mlp;
  if (name == "linear_svm" || name == "svm") return ClassifierKind::LinearSvm;
  throw Error(ErrorCode::InvalidArgument, "unknown classifier kind '" + std::string(name) + "'");
}

void ClassifierSpec::validate() const {
  auto positive = [](std::size_t v, const char* what) {
    if (v < 1) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be >= 1");
  };
  auto nonneg = [](double v, const char* what) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be >= 0");
  };
  auto rate = [](double v) {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning_rate must be > 0");
  };
  switch (kind()) {
    case ClassifierKind::LogReg: {
      const auto& p = std::get<LogRegParams>(params);
      nonneg(p.l2, "l2");
      positive(p.max_iters, "max_iters");
      rate(p.learning_rate);
      break;
    }
    case ClassifierKind::Mlp: {
      const auto& p = std::get<MlpParams>(params);
      if (p.hidden.empty()) throw Error(ErrorCode::InvalidArgument, "mlp needs at least one hidden layer");
      for (std::size_t h : p.hidden) positive(h, "hidden size");
      nonneg(p.l2, "l2");
      positive(p.epochs, "epochs");
      rate(p.learning_rate);
      break;
    }
    case ClassifierKind::LinearSvm: {
      const auto& p = std::get<SvmParams>(params);
      if (!(p.C > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be > 0");
      positive(p.epochs, "epochs");
      rate(p.learning_rate);
      break;
    }
  }
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  Standardizer s;
  const double n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean().transpose();
  s.scale.resize(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double var = (x.col(c).array() - s.mean(c)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale(c) = sd < kMinScale ? 1.0 : sd;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) throw Error(ErrorCode::DimensionMismatch, "feature dimension differs from training");
  Eigen::MatrixXd out = x.rowwise() - mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

Eigen::MatrixXd to_matrix(std::span<const FeatureVector> features) {
  if (features.empty()) return {};
  const std::size_t d = features.front().values.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(features.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].values.size() != d) {
      throw Error(ErrorCode::DimensionMismatch, "subject " + features[i].subject_id + " has a different feature length");
    }
    for (std::size_t j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = features[i].values[j];
  }
  return x;
}

std::vector<DenseLayer> init_layers(const ClassifierSpec& spec, std::size_t input_dim) {
  std::vector<DenseLayer> layers;
  const auto d = static_cast<Eigen::Index>(input_dim);
  if (spec.kind() != ClassifierKind::Mlp) {
    layers.push_back({Eigen::MatrixXd::Zero(1, d), Eigen::VectorXd::Zero(1)});
    return layers;
  }
  const auto& p = std::get<MlpParams>(spec.params);
  Rng rng(p.seed);
  std::vector<std::size_t> widths{input_dim};
  widths.insert(widths.end(), p.hidden.begin(), p.hidden.end());
  widths.push_back(1);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(widths[l]);
    const auto out = static_cast<Eigen::Index>(widths[l + 1]);
    const bool output = l + 2 == widths.size();
    // He initialization for ReLU layers, Xavier-style for the logit
    const double sd = std::sqrt((output ? 1.0 : 2.0) / static_cast<double>(in));
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = rng.normal(0.0, sd);
    }
    layers.push_back(std::move(layer));
  }
  return layers;
}

double objective(const ClassifierSpec& spec, const std::vector<DenseLayer>& layers,
                 const Eigen::MatrixXd& x, std::span<const int> labels, std::vector<DenseLayer>* grad) {
  check_labels(labels, x.rows());
  const auto n = x.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double lambda = l2_strength(spec, static_cast<std::size_t>(n));

  // forward; acts[l] is the input to layer l
  std::vector<Eigen::MatrixXd> acts{x};
  std::vector<Eigen::MatrixXd> pre;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    pre.push_back(affine(layers[l], acts.back()));
    acts.push_back(pre.back().cwiseMax(0.0));
  }
  const Eigen::VectorXd z = affine(layers.back(), acts.back()).col(0);

  double data_loss = 0.0;
  Eigen::VectorXd dz(n);
  if (spec.kind() == ClassifierKind::LinearSvm) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
      const double slack = 1.0 - s * z(i);
      data_loss += std::max(0.0, slack);
      dz(i) = slack > 0.0 ? -s * inv_n : 0.0;
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double y = labels[static_cast<std::size_t>(i)];
      data_loss += softplus(z(i)) - y * z(i);
      dz(i) = (sigmoid(z(i)) - y) * inv_n;
    }
  }
  data_loss *= inv_n;

  double reg = 0.0;
  for (const auto& layer : layers) reg += layer.weights.squaredNorm();
  const double loss = data_loss + 0.5 * lambda * reg;
  if (!grad) return loss;

  grad->resize(layers.size());
  Eigen::MatrixXd delta = dz;  // n x outputs of the current layer
  for (std::size_t l = layers.size(); l-- > 0;) {
    auto& g = (*grad)[l];
    g.weights = delta.transpose() * acts[l] + lambda * layers[l].weights;
    g.bias = delta.colwise().sum().transpose();
    if (l == 0) break;
    Eigen::MatrixXd back = delta * layers[l].weights;
    delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return loss;
}

std::vector<double> flatten(const std::vector<DenseLayer>& layers) {
  std::vector<double> flat;
  for (const auto& layer : layers) {
    flat.insert(flat.end(), layer.weights.data(), layer.weights.data() + layer.weights.size());
    flat.insert(flat.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
  }
  return flat;
}

void unflatten(std::span<const double> flat, std::vector<DenseLayer>& layers) {
  std::size_t pos = 0;
  for (auto& layer : layers) {
    const auto w = static_cast<std::size_t>(layer.weights.size());
    const auto b = static_cast<std::size_t>(layer.bias.size());
    if (pos + w + b > flat.size()) throw Error(ErrorCode::DimensionMismatch, "flat parameter vector too short");
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), w, layer.weights.data());
    pos += w;
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), b, layer.bias.data());
    pos += b;
  }
  if (pos != flat.size()) throw Error(ErrorCode::DimensionMismatch, "flat parameter vector too long");
}

TrainedModel train(const ClassifierSpec& spec, const Eigen::MatrixXd& x, std::span<const int> labels) {
  spec.validate();
  check_labels(labels, x.rows());
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size())) {
    throw Error(ErrorCode::SingleClassTraining, "training labels contain a single class");
  }

  TrainedModel model;
  model.spec = spec;
  model.standardizer = Standardizer::fit(x);
  const Eigen::MatrixXd xs = model.standardizer.apply(x);
  model.layers = init_layers(spec, static_cast<std::size_t>(x.cols()));

  double rate = 0.0;
  std::size_t epochs = 0;
  switch (spec.kind()) {
    case ClassifierKind::LogReg: {
      const auto& p = std::get<LogRegParams>(spec.params);
      rate = p.learning_rate;
      epochs = p.max_iters;
      break;
    }
    case ClassifierKind::Mlp: {
      const auto& p = std::get<MlpParams>(spec.params);
      rate = p.learning_rate;
      epochs = p.epochs;
      break;
    }
    case ClassifierKind::LinearSvm: {
      const auto& p = std::get<SvmParams>(spec.params);
      rate = p.learning_rate;
      epochs = p.epochs;
      break;
    }
  }

  std::vector<DenseLayer> grad;
  std::vector<DenseLayer> trial_grad;
  double loss = objective(spec, model.layers, xs, labels, &grad);
  model.loss_history.push_back(loss);
  std::vector<DenseLayer> trial = model.layers;
  for (std::size_t epoch = 0; epoch < epochs && rate > kMinLearningRate; ++epoch) {
    for (std::size_t l = 0; l < trial.size(); ++l) {
      trial[l].weights = model.layers[l].weights - rate * grad[l].weights;
      trial[l].bias = model.layers[l].bias - rate * grad[l].bias;
    }
    const double trial_loss = objective(spec, trial, xs, labels, &trial_grad);
    if (std::isfinite(trial_loss) && trial_loss <= loss) {
      std::swap(model.layers, trial);
      std::swap(grad, trial_grad);
      loss = trial_loss;
    } else {
      rate *= 0.5;
    }
    model.loss_history.push_back(loss);
  }
  return model;
}

TrainedModel train(const ClassifierSpec& spec, std::span<const FeatureVector> features,
                   std::span<const int> labels) {
  return train(spec, to_matrix(features), labels);
}

Prediction predict(const TrainedModel& model, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != model.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "feature dimension differs from training");
  }
  Eigen::MatrixXd a = model.standardizer.apply(x);
  for (std::size_t l = 0; l + 1 < model.layers.size(); ++l) a = affine(model.layers[l], a).cwiseMax(0.0);
  const Eigen::VectorXd z = affine(model.layers.back(), a).col(0);

  Prediction out;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double score = sigmoid(z(i));
    out.scores.push_back(score);
    out.labels.push_back(score >= 0.5 ? 1 : 0);
  }
  return out;
}

Eigen::MatrixXd embed(const TrainedModel& model, const Eigen::MatrixXd& x) {
  if (model.spec.kind() != ClassifierKind::Mlp) throw Error(ErrorCode::NotAnMLP, "embeddings need an mlp model");
  if (static_cast<std::size_t>(x.cols()) != model.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "feature dimension differs from training");
  }
  Eigen::MatrixXd a = model.standardizer.apply(x);
  for (std::size_t l = 0; l + 1 < model.layers.size(); ++l) a = affine(model.layers[l], a).cwiseMax(0.0);
  return a;
}

}  // namespace hotda
