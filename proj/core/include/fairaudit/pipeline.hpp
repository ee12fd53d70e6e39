#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fairaudit/audit.hpp"
#include "fairaudit/features.hpp"
#include "fairaudit/scorer.hpp"
#include "fairaudit/synthgen.hpp"

namespace fairaudit {

struct ManifestOutput {
  std::string path;  // relative to the manifest's directory
  std::string hash;
};

struct ManifestStage {
  std::string name;
  bool completed = false;
  std::vector<ManifestOutput> outputs;
};

// Records what a command ran with and what it produced. Every output file is
// referenced with a content hash, so a rerun can both verify and resume.
class RunManifest {
 public:
  RunManifest() = default;
  RunManifest(std::string command, std::string config_json);

  static std::optional<RunManifest> load(const std::string& path);
  void save(const std::string& path) const;

  // Stage completed earlier with every output present and hash-identical.
  bool stage_valid(const std::string& name, const std::string& dir) const;
  void complete_stage(const std::string& name, const std::vector<std::string>& relative_paths,
                      const std::string& dir);

  const std::string& command() const { return command_; }
  const std::string& config_json() const { return config_json_; }
  const std::string& config_hash() const { return config_hash_; }
  const std::vector<ManifestStage>& stages() const { return stages_; }

 private:
  std::string command_;
  std::string config_json_;
  std::string config_hash_;
  std::vector<ManifestStage> stages_;
};

struct PipelineConfig {
  GeneratorConfig generator;
  FeatureConfig features;  // include_gender is ignored; both arms are built
  TrainingConfig training;
  double train_fraction = 0.4;
  double downsample_target = 0.0478;
  double global_fp_ratio = 5.0;
  std::vector<double> fp_ratio_grid = {5.0, 2.0, 1.0, 0.5};
  BiasPolicy policy;
  std::uint32_t n_seeds = 10;
  std::uint64_t base_seed = 1;  // run seeds are base_seed .. base_seed + n_seeds - 1
};

void validate(const PipelineConfig& config);
std::string pipeline_config_to_json(const PipelineConfig& config);
PipelineConfig pipeline_config_from_json(const std::string& json_text);

struct PipelineResult {
  std::string out_dir;
  std::string manifest_path;
  // Aggregated reports per training arm and audit regime.
  std::string aggregate_global_standard;
  std::string aggregate_groupwise_standard;
  std::string aggregate_global_unaware;
  std::string aggregate_groupwise_unaware;
  std::vector<std::string> all_outputs;  // relative paths in manifest order
  std::uint32_t stages_skipped = 0;      // resumed from an earlier manifest
};

// generate -> featurize (standard and unaware) -> per run seed: downsample,
// train, score the test partition, audit in both regimes -> aggregate.
// Stage results land in out_dir; an existing manifest with the same config
// hash lets completed stages be skipped.
PipelineResult run_pipeline(const PipelineConfig& config, const std::string& out_dir,
                            const std::function<void(const std::string&)>& log = {});

}  // namespace fairaudit
