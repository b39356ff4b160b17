#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hotda/classify.hpp"
#include "hotda/ingest.hpp"
#include "hotda/stats.hpp"
#include "hotda/vectorize.hpp"

namespace hotda {

using json = nlohmann::ordered_json;

/// Non-finite doubles become the strings "inf", "-inf" or "nan".
json number(double v);

json to_json(const VectorizationConfig& config);
VectorizationConfig vectorization_config_from_json(const json& j);

json to_json(const ClassifierSpec& spec);
ClassifierSpec classifier_spec_from_json(const json& j);

json to_json(const Metrics& m);
json to_json(const EvalReport& report);

/// Shapes plus row-major value arrays.
json to_json(const TrainedModel& model);
TrainedModel model_from_json(const json& j);

/// {statistic, items: [{id, t, p, mean_a, mean_b}], ranking}
json to_json(const GroupComparison& gc);
json to_json(const std::vector<NodeVote>& votes);

enum class InputKind { TimeSeries, Distance };

struct ManifestEntry {
  std::string subject_id;
  Label label = Label::Control;
  std::filesystem::path path;  // resolved against the manifest directory on read
  InputKind kind = InputKind::Distance;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
/// Paths are written relative to the manifest directory when possible.
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

/// Loads the entry and converts time series to distances.
DistanceMatrix load_entry(const ManifestEntry& entry);

struct FeatureTable {
  std::vector<FeatureVector> rows;
  std::vector<int> labels;
};

/// subject_id,label,f0,f1,...
void write_features_csv(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable read_features_csv(const std::filesystem::path& path);

json layout_json(const std::vector<Segment>& layout, const VectorizationConfig& config,
                 std::size_t n_regions);
std::vector<Segment> layout_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const json& j);

std::string format_double(double v);

}  // namespace hotda
