#include "fairaudit/pipeline.hpp"

#include <filesystem>

#include <json.hpp>

#include "fairaudit/csv.hpp"
#include "fairaudit/hash.hpp"
#include "fairaudit/report_io.hpp"
#include "fairaudit/version.hpp"

namespace fairaudit {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

RunManifest::RunManifest(std::string command, std::string config_json)
    : command_(std::move(command)),
      config_json_(std::move(config_json)),
      config_hash_(hash_bytes(config_json_)) {}

std::optional<RunManifest> RunManifest::load(const std::string& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(read_text_file(path));
    RunManifest m;
    m.command_ = j.at("command").get<std::string>();
    m.config_json_ = j.at("config").dump(2) + "\n";
    m.config_hash_ = j.at("config_hash").get<std::string>();
    for (const auto& sj : j.at("stages")) {
      ManifestStage stage;
      stage.name = sj.at("name").get<std::string>();
      stage.completed = sj.at("completed").get<bool>();
      for (const auto& oj : sj.at("outputs")) {
        stage.outputs.push_back(
            {oj.at("path").get<std::string>(), oj.at("hash").get<std::string>()});
      }
      m.stages_.push_back(std::move(stage));
    }
    return m;
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable manifest = start fresh
  }
}

void RunManifest::save(const std::string& path) const {
  Json j;
  j["schema"] = "fairaudit.manifest.v1";
  j["tool_version"] = kToolVersion;
  j["command"] = command_;
  j["config"] = nlohmann::ordered_json::parse(config_json_);
  j["config_hash"] = config_hash_;
  Json stages = Json::array();
  for (const auto& stage : stages_) {
    Json outputs = Json::array();
    for (const auto& o : stage.outputs) {
      outputs.push_back({{"path", o.path}, {"hash", o.hash}});
    }
    stages.push_back({{"name", stage.name}, {"completed", stage.completed}, {"outputs", outputs}});
  }
  j["stages"] = stages;
  write_text_file(path, j.dump(2) + "\n");
}

bool RunManifest::stage_valid(const std::string& name, const std::string& dir) const {
  for (const auto& stage : stages_) {
    if (stage.name != name) continue;
    if (!stage.completed) return false;
    for (const auto& o : stage.outputs) {
      const auto path = (fs::path(dir) / o.path).string();
      std::error_code ec;
      if (!fs::exists(path, ec)) return false;
      if (hash_file(path) != o.hash) return false;
    }
    return true;
  }
  return false;
}

void RunManifest::complete_stage(const std::string& name,
                                 const std::vector<std::string>& relative_paths,
                                 const std::string& dir) {
  ManifestStage stage;
  stage.name = name;
  stage.completed = true;
  for (const auto& rel : relative_paths) {
    stage.outputs.push_back({rel, hash_file((fs::path(dir) / rel).string())});
  }
  for (auto& existing : stages_) {
    if (existing.name == name) {
      existing = std::move(stage);
      return;
    }
  }
  stages_.push_back(std::move(stage));
}

void validate(const PipelineConfig& config) {
  validate(config.generator);
  validate(config.features);
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw Error(errc::invalid_config, "train_fraction must be in (0,1)");
  }
  if (!(config.downsample_target > 0.0 && config.downsample_target < 1.0)) {
    throw Error(errc::invalid_config, "downsample_target must be in (0,1)");
  }
  if (config.n_seeds == 0) throw Error(errc::invalid_config, "n_seeds must be positive");
  AuditConfig audit;
  audit.global_fp_ratio = config.global_fp_ratio;
  audit.fp_ratio_grid = config.fp_ratio_grid;
  audit.policy = config.policy;
  validate(audit);
}

std::string pipeline_config_to_json(const PipelineConfig& c) {
  Json j;
  j["generator"] = nlohmann::ordered_json::parse(generator_config_to_json(c.generator));
  FeatureConfig features = c.features;
  features.include_gender = true;  // arm-specific; normalized in the snapshot
  j["features"] = nlohmann::ordered_json::parse(feature_config_to_json(features));
  j["training"] = {{"learning_rate", c.training.learning_rate},
                   {"epochs", c.training.epochs},
                   {"l2", c.training.l2},
                   {"class_weight", c.training.class_weight_balanced ? "balanced" : "none"}};
  j["train_fraction"] = c.train_fraction;
  j["downsample_target"] = c.downsample_target;
  j["audit"] = {{"global_fp_ratio", c.global_fp_ratio},
                {"fp_ratio_grid", c.fp_ratio_grid},
                {"bias_threshold", c.policy.bias_threshold}};
  j["n_seeds"] = c.n_seeds;
  j["base_seed"] = c.base_seed;
  return j.dump(2) + "\n";
}

PipelineConfig pipeline_config_from_json(const std::string& json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    PipelineConfig c;
    if (j.contains("generator")) {
      c.generator = generator_config_from_json(j.at("generator").dump());
    }
    if (j.contains("features")) {
      c.features = feature_config_from_json(j.at("features").dump());
    }
    if (j.contains("training")) {
      const auto& t = j.at("training");
      if (t.contains("learning_rate")) c.training.learning_rate = t.at("learning_rate").get<double>();
      if (t.contains("epochs")) c.training.epochs = t.at("epochs").get<int>();
      if (t.contains("l2")) c.training.l2 = t.at("l2").get<double>();
      if (t.contains("class_weight")) {
        c.training.class_weight_balanced = t.at("class_weight").get<std::string>() == "balanced";
      }
    }
    if (j.contains("train_fraction")) c.train_fraction = j.at("train_fraction").get<double>();
    if (j.contains("downsample_target")) {
      c.downsample_target = j.at("downsample_target").get<double>();
    }
    if (j.contains("audit")) {
      const auto& a = j.at("audit");
      if (a.contains("global_fp_ratio")) c.global_fp_ratio = a.at("global_fp_ratio").get<double>();
      if (a.contains("fp_ratio_grid")) {
        c.fp_ratio_grid = a.at("fp_ratio_grid").get<std::vector<double>>();
      }
      if (a.contains("bias_threshold")) {
        c.policy.bias_threshold = a.at("bias_threshold").get<double>();
      }
    }
    if (j.contains("n_seeds")) c.n_seeds = j.at("n_seeds").get<std::uint32_t>();
    if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
    validate(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::malformed_row, std::string("bad pipeline config JSON: ") + e.what());
  }
}

namespace {

struct ArmData {
  std::string name;  // "standard" / "unaware"
  std::string features_path;
  FeatureMatrix matrix;
};

std::vector<std::vector<double>> extract_features(const std::vector<FeatureRow>& rows) {
  std::vector<std::vector<double>> x;
  x.reserve(rows.size());
  for (const auto& r : rows) x.push_back(r.values);
  return x;
}

std::vector<int> extract_labels(const std::vector<FeatureRow>& rows) {
  std::vector<int> y;
  y.reserve(rows.size());
  for (const auto& r : rows) y.push_back(r.label);
  return y;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, const std::string& out_dir,
                            const std::function<void(const std::string&)>& log) {
  validate(config);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(errc::io_failure, "cannot create output directory: " + out_dir);

  const auto say = [&](const std::string& msg) {
    if (log) log(msg);
  };
  const std::string config_json = pipeline_config_to_json(config);
  const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();

  RunManifest manifest("pipeline", config_json);
  if (auto existing = RunManifest::load(manifest_path);
      existing && existing->config_hash() == manifest.config_hash() &&
      existing->command() == "pipeline") {
    manifest = std::move(*existing);
  }

  PipelineResult result;
  result.out_dir = out_dir;
  result.manifest_path = manifest_path;

  auto abs = [&](const std::string& rel) { return (fs::path(out_dir) / rel).string(); };
  auto run_stage = [&](const std::string& name, const std::vector<std::string>& outputs,
                       const std::function<void()>& body) {
    if (manifest.stage_valid(name, out_dir)) {
      ++result.stages_skipped;
      say("stage " + name + ": cached");
      return;
    }
    say("stage " + name);
    body();
    manifest.complete_stage(name, outputs, out_dir);
    manifest.save(manifest_path);
  };

  // generate
  std::vector<TransactionRecord> txns;
  run_stage("generate", {"txns.csv", "summary.json"}, [&] {
    txns = generate(config.generator);
    write_transactions_csv_file(abs("txns.csv"), txns);
    write_text_file(abs("summary.json"), summary_to_json(summarize(txns)));
  });
  if (txns.empty()) {
    auto parsed = read_transactions_csv_file(abs("txns.csv"));
    if (!parsed.ok()) throw Error(errc::malformed_row, "cached txns.csv failed to parse");
    txns = std::move(parsed.records);
  }

  // featurize, both arms
  const auto train_mask = train_mask_by_time(txns, config.train_fraction);
  std::vector<ArmData> arms(2);
  arms[0].name = "standard";
  arms[1].name = "unaware";
  for (auto& arm : arms) {
    arm.features_path = "features_" + arm.name + ".csv";
    run_stage("featurize_" + arm.name, {arm.features_path}, [&] {
      FeatureConfig fc = config.features;
      fc.include_gender = arm.name == "standard";
      arm.matrix = build_feature_matrix(txns, fc, train_mask);
      write_feature_csv_file(abs(arm.features_path), arm.matrix);
    });
    if (arm.matrix.rows.empty()) {
      arm.matrix = read_feature_csv_file(abs(arm.features_path));
    }
  }

  // per run seed: downsample + train + score + audit both regimes
  AuditConfig audit_cfg;
  audit_cfg.global_fp_ratio = config.global_fp_ratio;
  audit_cfg.fp_ratio_grid = config.fp_ratio_grid;
  audit_cfg.policy = config.policy;

  std::vector<std::string> run_names;
  for (std::uint32_t k = 0; k < config.n_seeds; ++k) {
    const std::uint64_t run_seed = config.base_seed + k;
    for (auto& arm : arms) {
      const std::string tag = arm.name + "_seed" + std::to_string(run_seed);
      run_names.push_back(tag);
      const std::string model_path = "model_" + tag + ".json";
      const std::string scored_path = "scored_" + tag + ".csv";
      const std::string global_path = "report_global_" + tag + ".json";
      const std::string groupwise_path = "report_groupwise_" + tag + ".json";
      run_stage("run_" + tag, {model_path, scored_path, global_path, groupwise_path}, [&] {
        std::vector<FeatureRow> train_rows;
        std::vector<const FeatureRow*> test_rows;
        for (const auto& row : arm.matrix.rows) {
          if (row.is_train) train_rows.push_back(row);
          else test_rows.push_back(&row);
        }
        const auto downsampled =
            downsample_negatives(train_rows, config.downsample_target, run_seed);
        const auto model = train(extract_features(downsampled), extract_labels(downsampled),
                                 arm.matrix.feature_names, config.training, run_seed);
        write_model_file(abs(model_path), model);

        std::vector<ScoredRecord> scored;
        scored.reserve(test_rows.size());
        for (const auto* row : test_rows) {
          ScoredRecord s;
          s.score = score_one(model, row->values);
          s.label = row->label;
          s.group = row->group;
          s.value = row->value;
          s.card_id = row->card_id;
          scored.push_back(std::move(s));
        }
        write_scored_csv_file(abs(scored_path), scored);

        audit_cfg.mode = AuditMode::GlobalThreshold;
        write_text_file(abs(global_path), report_to_json(audit_global(scored, audit_cfg)));
        audit_cfg.mode = AuditMode::GroupwiseThreshold;
        write_text_file(abs(groupwise_path), report_to_json(audit_groupwise(scored, audit_cfg)));
      });
    }
  }

  // aggregate per arm and regime
  for (const auto& arm : arms) {
    for (const std::string regime : {"global", "groupwise"}) {
      const std::string out_path = "aggregate_" + regime + "_" + arm.name + ".json";
      run_stage("aggregate_" + regime + "_" + arm.name, {out_path}, [&] {
        std::vector<AuditReport> reports;
        for (std::uint32_t k = 0; k < config.n_seeds; ++k) {
          const std::uint64_t run_seed = config.base_seed + k;
          const std::string path =
              "report_" + regime + "_" + arm.name + "_seed" + std::to_string(run_seed) + ".json";
          reports.push_back(report_from_json(read_text_file(abs(path))));
        }
        write_text_file(abs(out_path), report_to_json(aggregate_runs(reports)));
      });
    }
  }

  result.aggregate_global_standard = abs("aggregate_global_standard.json");
  result.aggregate_groupwise_standard = abs("aggregate_groupwise_standard.json");
  result.aggregate_global_unaware = abs("aggregate_global_unaware.json");
  result.aggregate_groupwise_unaware = abs("aggregate_groupwise_unaware.json");
  for (const auto& stage : manifest.stages()) {
    for (const auto& o : stage.outputs) result.all_outputs.push_back(o.path);
  }
  manifest.save(manifest_path);
  return result;
}

}  // namespace fairaudit
