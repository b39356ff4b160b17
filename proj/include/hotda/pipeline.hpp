#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hotda/classify.hpp"
#include "hotda/filtration.hpp"
#include "hotda/ingest.hpp"
#include "hotda/serialization.hpp"
#include "hotda/vectorize.hpp"

namespace hotda {

struct SynthConfig {
  std::size_t n_per_class = 0;
  ShapeSpec class_a{Shape::Circle, 40, 0.05};
  ShapeSpec class_b{Shape::UniformNoise, 40, 0.05};
  std::uint64_t seed = 0;
};

struct CvConfig {
  std::size_t k = 5;
  std::uint64_t seed = 0;
};

struct StatsConfig {
  std::size_t n_thresholds = 100;
  std::set<std::size_t> threshold_dims{1, 2};
  std::vector<double> node_eps{0.5};
  std::size_t top_k = 10;
};

struct PipelineConfig {
  std::string manifest;  // as written; empty means <out>/manifest.json
  SynthConfig synth;
  RipsOptions rips;
  VectorizationConfig vectorization;
  std::vector<ClassifierSpec> classifiers;
  CvConfig cv;
  StatsConfig stats;

  std::filesystem::path base_dir;  // relative paths resolve against this
  std::filesystem::path out_dir;
  std::size_t jobs = 1;
  bool verbose = false;

  std::filesystem::path manifest_path() const;
};

/// Missing sections keep their defaults; unknown top-level keys are rejected.
PipelineConfig config_from_json(const json& j, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

/// The result-affecting part of the config. Output directory and worker count
/// are left out so outputs do not depend on where or how wide a run was.
json to_json(const PipelineConfig& config);

/// Applies --seed: replaces the synth and cross-validation seeds.
void override_seed(PipelineConfig& config, std::uint64_t seed);

/// Writes data/<id>.csv distance matrices and manifest.json under out_dir.
std::vector<ManifestEntry> cmd_synth(const PipelineConfig& config, std::ostream& log);

/// Writes diagrams/<id>.csv, features.csv and features_layout.json.
FeatureTable cmd_features(const PipelineConfig& config, std::ostream& log);

/// Writes reports/<name>.json, models/<name>.json and, for MLPs,
/// embeddings/<name>.csv; prints a summary table to `log`.
std::vector<EvalReport> cmd_classify(const PipelineConfig& config, std::ostream& log);

/// Writes stats/thresholds.json, stats/nodes_eps<eps>.json, stats/node_votes.json,
/// stats/betti_auc.json and stats/mean_betti_curves.csv.
void cmd_stats(const PipelineConfig& config, std::ostream& log);

}  // namespace hotda
