#include "hotda/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "hotda/error.hpp"
#include "hotda/persistence.hpp"
#include "hotda/stats.hpp"

namespace hotda {

namespace fs = std::filesystem;

namespace {

template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw Error(ErrorCode::ConfigError, std::string("unknown key '") + key + "' in " + where);
  }
}

ShapeSpec shape_from_json(const json& j, ShapeSpec s) {
  reject_unknown(j, {"shape", "n_points", "noise_sigma"}, "shape spec");
  if (j.contains("shape")) {
    try {
      s.shape = parse_shape(field<std::string>(j, "shape", ""));
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
  }
  s.n_points = field(j, "n_points", s.n_points);
  s.noise_sigma = field(j, "noise_sigma", s.noise_sigma);
  if (s.noise_sigma < 0.0) throw Error(ErrorCode::ConfigError, "noise_sigma must be >= 0");
  return s;
}

json shape_json(const ShapeSpec& s) {
  return json{{"shape", std::string(to_string(s.shape))}, {"n_points", s.n_points}, {"noise_sigma", s.noise_sigma}};
}

std::vector<ClassifierSpec> default_classifiers() {
  return {ClassifierSpec{"logreg", LogRegParams{}}, ClassifierSpec{"mlp", MlpParams{}}};
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", eps);
  return buf;
}

// Row-major matrix with a header row.
void write_table_csv(const fs::path& path, const std::vector<std::string>& header,
                     const std::vector<std::string>& row_ids, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << row_ids[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << format_double(m(r, c));
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

fs::path PipelineConfig::manifest_path() const {
  return manifest.empty() ? out_dir / "manifest.json" : resolve(base_dir, manifest);
}

PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
  reject_unknown(j, {"manifest", "out_dir", "jobs", "synth", "filtration", "vectorization", "classifiers", "cv", "stats"},
                 "config");
  PipelineConfig c;
  c.base_dir = base_dir;
  c.manifest = field<std::string>(j, "manifest", "");
  c.out_dir = resolve(base_dir, field<std::string>(j, "out_dir", "out"));
  c.jobs = field(j, "jobs", c.jobs);

  if (j.contains("synth")) {
    const json& s = j.at("synth");
    reject_unknown(s, {"n_per_class", "class_a", "class_b", "seed"}, "synth");
    c.synth.n_per_class = field(s, "n_per_class", c.synth.n_per_class);
    if (s.contains("class_a")) c.synth.class_a = shape_from_json(s.at("class_a"), c.synth.class_a);
    if (s.contains("class_b")) c.synth.class_b = shape_from_json(s.at("class_b"), c.synth.class_b);
    c.synth.seed = field(s, "seed", c.synth.seed);
  }
  if (j.contains("filtration")) {
    const json& f = j.at("filtration");
    reject_unknown(f, {"max_dim", "max_eps", "max_simplices"}, "filtration");
    c.rips.max_dim = field(f, "max_dim", c.rips.max_dim);
    c.rips.max_eps = field(f, "max_eps", c.rips.max_eps);
    c.rips.max_simplices = field(f, "max_simplices", c.rips.max_simplices);
  }
  if (c.rips.max_dim < 1 || c.rips.max_dim > kMaxSimplexDim) {
    throw Error(ErrorCode::ConfigError, "filtration.max_dim must be in [1, 3]");
  }
  if (!(c.rips.max_eps > 0.0 && c.rips.max_eps <= 2.0)) {
    throw Error(ErrorCode::ConfigError, "filtration.max_eps must be in (0, 2]");
  }
  if (j.contains("vectorization")) {
    const json& v = j.at("vectorization");
    reject_unknown(v, {"n_bins", "n_layers", "heat_sigmas", "heat_grid", "range", "max_hom_dim"}, "vectorization");
    c.vectorization = vectorization_config_from_json(v);
  }
  if (j.contains("classifiers")) {
    const json& list = j.at("classifiers");
    if (!list.is_array() || list.empty()) throw Error(ErrorCode::ConfigError, "classifiers must be a non-empty array");
    for (const auto& spec : list) c.classifiers.push_back(classifier_spec_from_json(spec));
  } else {
    c.classifiers = default_classifiers();
  }
  for (std::size_t a = 0; a < c.classifiers.size(); ++a) {
    for (std::size_t b = a + 1; b < c.classifiers.size(); ++b) {
      if (c.classifiers[a].name == c.classifiers[b].name) {
        throw Error(ErrorCode::ConfigError, "duplicate classifier name '" + c.classifiers[a].name + "'");
      }
    }
  }
  if (j.contains("cv")) {
    const json& cv = j.at("cv");
    reject_unknown(cv, {"k", "seed"}, "cv");
    c.cv.k = field(cv, "k", c.cv.k);
    c.cv.seed = field(cv, "seed", c.cv.seed);
  }
  if (c.cv.k < 2) throw Error(ErrorCode::ConfigError, "cv.k must be >= 2");
  if (j.contains("stats")) {
    const json& s = j.at("stats");
    reject_unknown(s, {"n_thresholds", "threshold_dims", "node_eps", "top_k"}, "stats");
    c.stats.n_thresholds = field(s, "n_thresholds", c.stats.n_thresholds);
    c.stats.threshold_dims = field(s, "threshold_dims", c.stats.threshold_dims);
    c.stats.node_eps = field(s, "node_eps", c.stats.node_eps);
    c.stats.top_k = field(s, "top_k", c.stats.top_k);
  }
  if (c.stats.n_thresholds == 0) throw Error(ErrorCode::ConfigError, "stats.n_thresholds must be positive");
  if (c.stats.threshold_dims.empty() || *c.stats.threshold_dims.rbegin() > 2) {
    throw Error(ErrorCode::ConfigError, "stats.threshold_dims must be a non-empty subset of {0, 1, 2}");
  }
  for (double eps : c.stats.node_eps) {
    if (!(eps > 0.0 && eps <= 2.0)) throw Error(ErrorCode::ConfigError, "stats.node_eps entries must be in (0, 2]");
  }
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  json j;
  try {
    j = read_json_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return config_from_json(j, path.parent_path());
}

json to_json(const PipelineConfig& c) {
  json classifiers = json::array();
  for (const auto& spec : c.classifiers) classifiers.push_back(to_json(spec));
  return json{
      {"manifest", c.manifest},
      {"synth",
       {{"n_per_class", c.synth.n_per_class},
        {"class_a", shape_json(c.synth.class_a)},
        {"class_b", shape_json(c.synth.class_b)},
        {"seed", c.synth.seed}}},
      {"filtration",
       {{"max_dim", c.rips.max_dim}, {"max_eps", c.rips.max_eps}, {"max_simplices", c.rips.max_simplices}}},
      {"vectorization", to_json(c.vectorization)},
      {"classifiers", classifiers},
      {"cv", {{"k", c.cv.k}, {"seed", c.cv.seed}}},
      {"stats",
       {{"n_thresholds", c.stats.n_thresholds},
        {"threshold_dims", c.stats.threshold_dims},
        {"node_eps", c.stats.node_eps},
        {"top_k", c.stats.top_k}}},
  };
}

void override_seed(PipelineConfig& config, std::uint64_t seed) {
  config.synth.seed = seed;
  config.cv.seed = seed;
}

std::vector<ManifestEntry> cmd_synth(const PipelineConfig& config, std::ostream& log) {
  if (config.synth.n_per_class == 0) throw Error(ErrorCode::ConfigError, "synth.n_per_class must be positive");
  const auto cohort = synth_cohort(config.synth.n_per_class, config.synth.class_a, config.synth.class_b,
                                   config.synth.seed);
  const fs::path data_dir = config.out_dir / "data";
  ensure_dir(data_dir);
  std::vector<ManifestEntry> entries;
  for (const auto& rec : cohort) {
    const fs::path path = data_dir / (rec.subject_id + ".csv");
    write_matrix_csv(path, rec.distance.n, rec.distance.n, rec.distance.w);
    entries.push_back({rec.subject_id, rec.label, path, InputKind::Distance});
  }
  const fs::path manifest = config.out_dir / "manifest.json";
  write_manifest(manifest, entries);
  log << "wrote " << entries.size() << " subjects and " << manifest.string() << '\n';
  return entries;
}

FeatureTable cmd_features(const PipelineConfig& config, std::ostream& log) {
  const auto entries = read_manifest(config.manifest_path());
  if (entries.empty()) throw Error(ErrorCode::InvalidArgument, "manifest lists no subjects");
  const fs::path diagram_dir = config.out_dir / "diagrams";
  ensure_dir(diagram_dir);

  struct Outcome {
    FeatureVector features;
    std::size_t n_regions = 0;
    std::optional<ErrorCode> code;
    std::string message;
  };
  std::vector<Outcome> outcomes(entries.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto work = [&]() {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      const auto& entry = entries[i];
      Outcome& out = outcomes[i];
      try {
        const DistanceMatrix d = load_entry(entry);
        const FilteredComplex complex = build_rips(d, config.rips);
        PersistenceDiagram diagram = compute_persistence(complex);
        diagram.subject_id = entry.subject_id;
        write_diagram_csv(diagram_dir / (entry.subject_id + ".csv"), diagram);
        out.features = extract_features(diagram, d, config.vectorization);
        out.n_regions = d.n;
        if (config.verbose) {
          std::lock_guard lock(log_mutex);
          log << entry.subject_id << ": " << complex.size() << " simplices, " << diagram.pairs.size()
              << " pairs\n";
        }
      } catch (const Error& e) {
        out.code = e.code();
        out.message = e.what();
      } catch (const std::exception& e) {
        out.code = ErrorCode::InvalidArgument;
        out.message = e.what();
      }
    }
  };

  const std::size_t width = std::clamp<std::size_t>(config.jobs, 1, entries.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < width; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::optional<ErrorCode> first;
  std::string summary;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!outcomes[i].code) continue;
    if (!first) first = outcomes[i].code;
    ++failed;
    summary += "\n  " + entries[i].subject_id + ": " + outcomes[i].message;
  }
  if (first) {
    throw Error(*first, std::to_string(failed) + " of " + std::to_string(entries.size()) +
                            " subjects failed" + summary);
  }

  const std::size_t n_regions = outcomes.front().n_regions;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (outcomes[i].n_regions != n_regions) {
      throw Error(ErrorCode::DimensionMismatch, "subject " + entries[i].subject_id + " has " +
                                                    std::to_string(outcomes[i].n_regions) + " regions, expected " +
                                                    std::to_string(n_regions));
    }
  }

  FeatureTable table;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    table.rows.push_back(std::move(outcomes[i].features));
    table.labels.push_back(static_cast<int>(entries[i].label));
  }
  write_features_csv(config.out_dir / "features.csv", table);
  json layout = layout_json(feature_layout(config.vectorization, n_regions), config.vectorization, n_regions);
  layout["config"] = to_json(config);
  write_json_file(config.out_dir / "features_layout.json", layout);
  log << "wrote features for " << table.rows.size() << " subjects (" << table.rows.front().values.size()
      << " values each)\n";
  return table;
}

std::vector<EvalReport> cmd_classify(const PipelineConfig& config, std::ostream& log) {
  const json layout = read_json_file(config.out_dir / "features_layout.json");
  const FeatureTable table = read_features_csv(config.out_dir / "features.csv");
  if (table.rows.empty()) throw Error(ErrorCode::TooFewSamples, "features.csv has no rows");

  std::size_t n_regions = 0;
  std::size_t total = 0;
  try {
    n_regions = layout.at("n_regions").get<std::size_t>();
    total = layout.at("total_length").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::LayoutMismatch, std::string("features_layout.json: ") + e.what());
  }
  const auto expected = feature_layout(config.vectorization, n_regions);
  const auto recorded = layout_from_json(layout);
  bool same = expected.size() == recorded.size();
  for (std::size_t i = 0; same && i < expected.size(); ++i) {
    same = expected[i].name == recorded[i].name && expected[i].offset == recorded[i].offset &&
           expected[i].length == recorded[i].length;
  }
  if (!same) throw Error(ErrorCode::LayoutMismatch, "features_layout.json does not match the vectorization config");
  for (const auto& row : table.rows) {
    if (row.values.size() != total) {
      throw Error(ErrorCode::LayoutMismatch, "subject " + row.subject_id + " has " + std::to_string(row.values.size()) +
                                                 " values, layout expects " + std::to_string(total));
    }
  }

  const Eigen::MatrixXd x = to_matrix(table.rows);
  std::vector<std::string> ids;
  for (const auto& row : table.rows) ids.push_back(row.subject_id);

  ensure_dir(config.out_dir / "reports");
  ensure_dir(config.out_dir / "models");
  std::vector<EvalReport> reports;
  for (const auto& spec : config.classifiers) {
    if (config.verbose) log << "cross-validating " << spec.name << '\n';
    EvalReport report = kfold_cv(spec, x, table.labels, config.cv.k, config.cv.seed);
    json rj = to_json(report);
    rj["subjects"] = ids;
    rj["config"] = to_json(config);
    write_json_file(config.out_dir / "reports" / (spec.name + ".json"), rj);

    const TrainedModel model = train(spec, x, table.labels);
    json mj = to_json(model);
    mj["config"] = to_json(config);
    write_json_file(config.out_dir / "models" / (spec.name + ".json"), mj);
    if (spec.kind() == ClassifierKind::Mlp) {
      ensure_dir(config.out_dir / "embeddings");
      const Eigen::MatrixXd e = embed(model, x);
      std::vector<std::string> header{"subject_id"};
      for (Eigen::Index c = 0; c < e.cols(); ++c) header.push_back("e" + std::to_string(c));
      write_table_csv(config.out_dir / "embeddings" / (spec.name + ".csv"), header, ids, e);
    }
    reports.push_back(std::move(report));
  }

  std::size_t width = 10;
  for (const auto& spec : config.classifiers) width = std::max(width, spec.name.size() + 2);
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s %9s %9s %9s %9s\n", static_cast<int>(width), "model", "accuracy",
                "precision", "recall", "f1");
  log << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "%-*s %9.4f %9.4f %9.4f %9.4f\n", static_cast<int>(width),
                  r.spec.name.c_str(), r.mean.accuracy, r.mean.precision, r.mean.recall, r.mean.f1);
    log << line;
  }
  return reports;
}

void cmd_stats(const PipelineConfig& config, std::ostream& log) {
  const auto entries = read_manifest(config.manifest_path());
  if (entries.empty()) throw Error(ErrorCode::InvalidArgument, "manifest lists no subjects");
  const fs::path diagram_dir = config.out_dir / "diagrams";
  const std::size_t mhd = config.vectorization.max_hom_dim;
  const Interval range = config.vectorization.range;

  std::vector<PersistenceDiagram> diagrams;
  diagrams.reserve(entries.size());
  for (const auto& e : entries) {
    const fs::path p = diagram_dir / (e.subject_id + ".csv");
    if (!fs::exists(p)) throw Error(ErrorCode::IoError, "missing diagram for subject " + e.subject_id + ": " + p.string());
    try {
      diagrams.push_back(read_diagram_csv(p, e.subject_id, config.rips.max_eps));
    } catch (const Error& err) {
      throw Error(err.code(), "subject " + e.subject_id + ": " + err.what());
    }
  }
  std::vector<LabeledDiagram> labeled;
  for (std::size_t i = 0; i < entries.size(); ++i) labeled.push_back({&diagrams[i], entries[i].label});

  const fs::path stats_dir = config.out_dir / "stats";
  ensure_dir(stats_dir);
  const json echo = to_json(config);

  const GroupComparison thresholds =
      rank_thresholds(labeled, config.stats.n_thresholds, config.stats.threshold_dims, range);
  std::size_t significant = 0;
  for (const auto& it : thresholds.items) significant += it.p < 0.05 ? 1 : 0;
  json tj = to_json(thresholds);
  tj["n_significant_p05"] = significant;
  tj["config"] = echo;
  write_json_file(stats_dir / "thresholds.json", tj);

  std::vector<CohortRecord> cohort;
  for (const auto& e : entries) {
    try {
      cohort.push_back({e.subject_id, e.label, load_entry(e)});
    } catch (const Error& err) {
      throw Error(err.code(), "subject " + e.subject_id + ": " + err.what());
    }
  }
  std::vector<GroupComparison> node_rankings;
  for (double eps : config.stats.node_eps) {
    if (config.verbose) log << "ranking nodes at eps " << eps << '\n';
    GroupComparison gc = rank_nodes(cohort, eps, config.stats.top_k);
    json nj = to_json(gc);
    nj["eps"] = eps;
    nj["config"] = echo;
    write_json_file(stats_dir / ("nodes_eps" + eps_tag(eps) + ".json"), nj);
    node_rankings.push_back(std::move(gc));
  }
  json vj{{"votes", to_json(vote_nodes(node_rankings, config.stats.top_k))}, {"config", echo}};
  write_json_file(stats_dir / "node_votes.json", vj);

  std::set<std::size_t> dims;
  for (std::size_t k = 0; k <= mhd; ++k) dims.insert(k);
  std::vector<std::vector<double>> auc(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auc[i] = betti_auc(diagrams[i], dims, config.vectorization.n_bins, range);
  }
  json groups = json::array();
  for (std::size_t k = 0; k <= mhd; ++k) {
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < entries.size(); ++i) (entries[i].label == Label::Control ? a : b).push_back(auc[i][k]);
    if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "cohort needs both labels");
    const TTestResult r = ttest_or_null(a, b);
    double ma = 0.0;
    double mb = 0.0;
    for (double v : a) ma += v / static_cast<double>(a.size());
    for (double v : b) mb += v / static_cast<double>(b.size());
    groups.push_back(json{{"dim", k}, {"mean_a", number(ma)}, {"mean_b", number(mb)}, {"t", number(r.t)},
                          {"p", number(r.p)}, {"df", number(r.df)}});
  }
  json subjects = json::array();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    subjects.push_back(json{{"id", entries[i].subject_id}, {"label", static_cast<int>(entries[i].label)}, {"auc", auc[i]}});
  }
  write_json_file(stats_dir / "betti_auc.json", json{{"groups", groups}, {"subjects", subjects}, {"config", echo}});

  // Per-group mean Betti curves for plotting.
  const std::size_t n_bins = config.vectorization.n_bins;
  const auto grid = sample_grid(range, n_bins);
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_bins), static_cast<Eigen::Index>(2 * (mhd + 1)));
  std::array<std::size_t, 2> count{0, 0};
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const int g = static_cast<int>(entries[i].label);
    ++count[static_cast<std::size_t>(g)];
    const auto curve = betti_curve(diagrams[i], n_bins, range, mhd);
    for (std::size_t k = 0; k <= mhd; ++k) {
      for (std::size_t t = 0; t < n_bins; ++t) {
        means(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(2 * k + g)) += curve[k * n_bins + t];
      }
    }
  }
  for (std::size_t k = 0; k <= mhd; ++k) {
    for (int g = 0; g < 2; ++g) means.col(static_cast<Eigen::Index>(2 * k + g)) /= static_cast<double>(count[g]);
  }
  std::vector<std::string> header{"t"};
  for (std::size_t k = 0; k <= mhd; ++k) {
    header.push_back("H" + std::to_string(k) + "_label0");
    header.push_back("H" + std::to_string(k) + "_label1");
  }
  std::vector<std::string> row_ids;
  for (double t : grid) row_ids.push_back(format_double(t));
  write_table_csv(stats_dir / "mean_betti_curves.csv", header, row_ids, means);

  log << "thresholds with p < 0.05: " << significant << " of " << thresholds.items.size() << '\n';
  for (const auto& g : groups) {
    log << "H" << g["dim"].get<std::size_t>() << " Betti AUC: label0 mean " << g["mean_a"].dump() << ", label1 mean "
        << g["mean_b"].dump() << ", p " << g["p"].dump() << '\n';
  }
}

}  // namespace hotda
