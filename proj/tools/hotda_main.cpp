// Command-line driver: synth, features, classify and stats stages.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hotda/error.hpp"
#include "hotda/pipeline.hpp"

namespace {

int exit_code(const hotda::Error& e) {
  switch (hotda::category_of(e.code())) {
    case hotda::ErrorCategory::Config: return 2;
    case hotda::ErrorCategory::Data: return 3;
    case hotda::ErrorCategory::Resource: return 4;
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order topological features for connectivity cohorts"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::size_t jobs = 0;
  std::optional<std::uint64_t> seed;
  bool verbose = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Pipeline config (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides out_dir)");
    sub->add_option("--jobs", jobs, "Worker threads for feature extraction");
    sub->add_option("--seed", seed, "Overrides the synth and cross-validation seeds");
    sub->add_flag("--verbose", verbose, "Progress output");
  };
  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic cohort and its manifest");
  CLI::App* features = app.add_subcommand("features", "Persistence diagrams and fused feature vectors");
  CLI::App* classify = app.add_subcommand("classify", "Stratified k-fold evaluation of each classifier");
  CLI::App* stats = app.add_subcommand("stats", "Threshold, node and Betti-AUC group comparisons");
  for (CLI::App* sub : {synth, features, classify, stats}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    hotda::PipelineConfig config = hotda::load_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (jobs > 0) config.jobs = jobs;
    if (seed) hotda::override_seed(config, *seed);
    config.verbose = verbose;

    if (synth->parsed()) {
      hotda::cmd_synth(config, std::cout);
    } else if (features->parsed()) {
      hotda::cmd_features(config, std::cout);
    } else if (classify->parsed()) {
      hotda::cmd_classify(config, std::cout);
    } else {
      hotda::cmd_stats(config, std::cout);
    }
  } catch (const hotda::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
