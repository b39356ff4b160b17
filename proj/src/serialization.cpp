#include "hotda/serialization.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hotda/error.hpp"

namespace hotda {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("key '") + key + "': " + e.what());
  }
}

json vector_json(const Eigen::MatrixXd& m) {
  json values = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
  }
  return values;
}

}  // namespace

json to_json(const VectorizationConfig& c) {
  return json{{"n_bins", c.n_bins},          {"n_layers", c.n_layers},
              {"heat_sigmas", c.heat_sigmas}, {"heat_grid", c.heat_grid},
              {"range", {c.range.lo, c.range.hi}}, {"max_hom_dim", c.max_hom_dim}};
}

VectorizationConfig vectorization_config_from_json(const json& j) {
  VectorizationConfig c;
  c.n_bins = get_or(j, "n_bins", c.n_bins);
  c.n_layers = get_or(j, "n_layers", c.n_layers);
  c.heat_sigmas = get_or(j, "heat_sigmas", c.heat_sigmas);
  c.heat_grid = get_or(j, "heat_grid", c.heat_grid);
  if (j.contains("range")) {
    const auto r = get_or<std::vector<double>>(j, "range", {});
    if (r.size() != 2) throw Error(ErrorCode::ConfigError, "range must be [lo, hi]");
    c.range = {r[0], r[1]};
  }
  c.max_hom_dim = get_or(j, "max_hom_dim", c.max_hom_dim);
  if (c.max_hom_dim > 2) throw Error(ErrorCode::ConfigError, "max_hom_dim must be <= 2");
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return c;
}

json to_json(const ClassifierSpec& spec) {
  json j{{"name", spec.name}, {"kind", std::string(to_string(spec.kind()))}};
  switch (spec.kind()) {
    case ClassifierKind::LogReg: {
      const auto& p = std::get<LogRegParams>(spec.params);
      j["l2"] = p.l2;
      j["max_iters"] = p.max_iters;
      j["learning_rate"] = p.learning_rate;
      break;
    }
    case ClassifierKind::Mlp: {
      const auto& p = std::get<MlpParams>(spec.params);
      j["hidden"] = p.hidden;
      j["l2"] = p.l2;
      j["learning_rate"] = p.learning_rate;
      j["epochs"] = p.epochs;
      j["seed"] = p.seed;
      break;
    }
    case ClassifierKind::LinearSvm: {
      const auto& p = std::get<SvmParams>(spec.params);
      j["C"] = p.C;
      j["epochs"] = p.epochs;
      j["learning_rate"] = p.learning_rate;
      j["seed"] = p.seed;
      break;
    }
  }
  return j;
}

ClassifierSpec classifier_spec_from_json(const json& j) {
  ClassifierSpec spec;
  const auto kind_name = get_or<std::string>(j, "kind", "");
  ClassifierKind kind{};
  try {
    kind = parse_classifier_kind(kind_name);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  spec.name = get_or<std::string>(j, "name", std::string(to_string(kind)));
  switch (kind) {
    case ClassifierKind::LogReg: {
      LogRegParams p;
      p.l2 = get_or(j, "l2", p.l2);
      p.max_iters = get_or(j, "max_iters", p.max_iters);
      p.learning_rate = get_or(j, "learning_rate", p.learning_rate);
      spec.params = p;
      break;
    }
    case ClassifierKind::Mlp: {
      MlpParams p;
      p.hidden = get_or(j, "hidden", p.hidden);
      p.l2 = get_or(j, "l2", p.l2);
      p.learning_rate = get_or(j, "learning_rate", p.learning_rate);
      p.epochs = get_or(j, "epochs", p.epochs);
      p.seed = get_or(j, "seed", p.seed);
      spec.params = p;
      break;
    }
    case ClassifierKind::LinearSvm: {
      SvmParams p;
      p.C = get_or(j, "C", p.C);
      p.epochs = get_or(j, "epochs", p.epochs);
      p.learning_rate = get_or(j, "learning_rate", p.learning_rate);
      p.seed = get_or(j, "seed", p.seed);
      spec.params = p;
      break;
    }
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return spec;
}

json to_json(const Metrics& m) {
  return json{{"accuracy", m.accuracy},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"confusion",
               {{"tp", m.confusion.tp}, {"tn", m.confusion.tn}, {"fp", m.confusion.fp}, {"fn", m.confusion.fn}}}};
}

json to_json(const EvalReport& r) {
  json folds = json::array();
  for (const auto& f : r.folds) {
    json fj = to_json(f.metrics);
    fj["fold"] = f.fold;
    fj["n_train"] = f.n_train;
    fj["n_test"] = f.n_test;
    folds.push_back(std::move(fj));
  }
  return json{{"classifier", to_json(r.spec)}, {"k", r.k},         {"seed", r.seed},
              {"mean", to_json(r.mean)},      {"folds", folds}, {"fold_assignment", r.fold_of}};
}

json to_json(const TrainedModel& model) {
  json layers = json::array();
  for (const auto& l : model.layers) {
    layers.push_back(json{{"rows", l.weights.rows()},
                          {"cols", l.weights.cols()},
                          {"weights", vector_json(l.weights)},
                          {"bias", vector_json(l.bias)}});
  }
  return json{{"classifier", to_json(model.spec)},
              {"standardizer",
               {{"mean", vector_json(model.standardizer.mean)}, {"scale", vector_json(model.standardizer.scale)}}},
              {"layers", layers}};
}

TrainedModel model_from_json(const json& j) {
  TrainedModel model;
  try {
    model.spec = classifier_spec_from_json(j.at("classifier"));
    const auto mean = j.at("standardizer").at("mean").get<std::vector<double>>();
    const auto scale = j.at("standardizer").at("scale").get<std::vector<double>>();
    if (mean.size() != scale.size()) throw Error(ErrorCode::DimensionMismatch, "standardizer shapes differ");
    model.standardizer.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    model.standardizer.scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
    for (const auto& lj : j.at("layers")) {
      const auto rows = lj.at("rows").get<Eigen::Index>();
      const auto cols = lj.at("cols").get<Eigen::Index>();
      const auto w = lj.at("weights").get<std::vector<double>>();
      const auto b = lj.at("bias").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows) {
        throw Error(ErrorCode::DimensionMismatch, "layer shape does not match its values");
      }
      DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) layer.weights(r, c) = w[static_cast<std::size_t>(r * cols + c)];
        layer.bias(r) = b[static_cast<std::size_t>(r)];
      }
      model.layers.push_back(std::move(layer));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model json: ") + e.what());
  }
  if (model.layers.empty() || model.layers.front().weights.cols() != model.standardizer.mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "model input width differs from standardizer");
  }
  return model;
}

json to_json(const GroupComparison& gc) {
  json items = json::array();
  for (const auto& it : gc.items) {
    items.push_back(json{{"id", it.id}, {"t", number(it.t)}, {"p", number(it.p)},
                         {"mean_a", number(it.mean_a)}, {"mean_b", number(it.mean_b)}});
  }
  return json{{"statistic", gc.statistic_name}, {"items", items}, {"ranking", gc.ranking}};
}

json to_json(const std::vector<NodeVote>& votes) {
  json out = json::array();
  for (const auto& v : votes) {
    out.push_back(json{{"id", v.id}, {"votes", v.votes}, {"mean_abs_t", number(v.mean_abs_t)}});
  }
  return out;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  const json j = read_json_file(path);
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, path.string() + ": manifest must be a JSON array");
  const fs::path base = path.parent_path();
  std::vector<ManifestEntry> entries;
  for (const auto& e : j) {
    ManifestEntry entry;
    try {
      entry.subject_id = e.at("subject_id").get<std::string>();
      const int label = e.at("label").get<int>();
      if (label != 0 && label != 1) throw Error(ErrorCode::ConfigError, "label must be 0 or 1");
      entry.label = static_cast<Label>(label);
      fs::path p = e.at("path").get<std::string>();
      entry.path = p.is_absolute() ? p : base / p;
      const auto kind = e.at("kind").get<std::string>();
      if (kind == "timeseries") {
        entry.kind = InputKind::TimeSeries;
      } else if (kind == "distance") {
        entry.kind = InputKind::Distance;
      } else {
        throw Error(ErrorCode::ConfigError, "kind must be 'timeseries' or 'distance'");
      }
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::ConfigError, path.string() + ": " + ex.what());
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

void write_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries) {
  const fs::path base = path.parent_path();
  json j = json::array();
  for (const auto& e : entries) {
    const fs::path rel = e.path.lexically_relative(base);
    j.push_back(json{{"subject_id", e.subject_id},
                     {"label", static_cast<int>(e.label)},
                     {"path", (rel.empty() ? e.path : rel).generic_string()},
                     {"kind", e.kind == InputKind::TimeSeries ? "timeseries" : "distance"}});
  }
  write_json_file(path, j);
}

DistanceMatrix load_entry(const ManifestEntry& entry) {
  if (entry.kind == InputKind::TimeSeries) {
    return distance_matrix(load_time_series(entry.path, entry.subject_id));
  }
  return load_distance_matrix(entry.path, entry.subject_id);
}

void write_features_csv(const fs::path& path, const FeatureTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const std::size_t d = table.rows.empty() ? 0 : table.rows.front().values.size();
  out << "subject_id,label";
  for (std::size_t i = 0; i < d; ++i) out << ",f" << i;
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << table.rows[r].subject_id << ',' << table.labels[r];
    for (double v : table.rows[r].values) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

FeatureTable read_features_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("subject_id,label", 0) != 0) {
    throw Error(ErrorCode::ParseError, path.string() + ": missing header");
  }
  FeatureTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view sv(line);
    auto next_cell = [&]() {
      const auto comma = sv.find(',');
      std::string_view cell = sv.substr(0, comma);
      sv = comma == std::string_view::npos ? std::string_view{} : sv.substr(comma + 1);
      return cell;
    };
    FeatureVector fv;
    fv.subject_id = std::string(next_cell());
    const std::string_view label_cell = next_cell();
    int label = -1;
    std::from_chars(label_cell.data(), label_cell.data() + label_cell.size(), label);
    if (label != 0 && label != 1) {
      throw Error(ErrorCode::ParseError, path.string() + " line " + std::to_string(line_no) + ": bad label");
    }
    while (!sv.empty()) {
      const std::string_view cell = next_cell();
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::ParseError, path.string() + " line " + std::to_string(line_no));
      }
      fv.values.push_back(v);
    }
    table.rows.push_back(std::move(fv));
    table.labels.push_back(label);
  }
  return table;
}

json layout_json(const std::vector<Segment>& layout, const VectorizationConfig& config, std::size_t n_regions) {
  json segs = json::array();
  std::size_t total = 0;
  for (const auto& s : layout) {
    segs.push_back(json{{"name", s.name}, {"offset", s.offset}, {"length", s.length}});
    total += s.length;
  }
  return json{{"segments", segs}, {"total_length", total}, {"n_regions", n_regions}, {"config", to_json(config)}};
}

std::vector<Segment> layout_from_json(const json& j) {
  std::vector<Segment> out;
  try {
    for (const auto& s : j.at("segments")) {
      out.push_back({s.at("name").get<std::string>(), s.at("offset").get<std::size_t>(),
                     s.at("length").get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("layout json: ") + e.what());
  }
  return out;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace hotda
