#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairaudit/audit.hpp"
#include "fairaudit/csv.hpp"
#include "fairaudit/features.hpp"
#include "fairaudit/pipeline.hpp"
#include "fairaudit/report_io.hpp"
#include "fairaudit/scorer.hpp"
#include "fairaudit/synthgen.hpp"
#include "fairaudit/version.hpp"

namespace {

using namespace fairaudit;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitBiasFound = 4;

int exit_code_for(const Error& e) {
  return e.code() == errc::io_failure ? kExitIo : kExitConfig;
}

bool g_quiet = false;

void info(const std::string& msg) {
  if (!g_quiet) std::cerr << msg << '\n';
}

void print_issues(const std::vector<RowIssue>& issues) {
  std::size_t shown = 0;
  for (const auto& issue : issues) {
    std::cerr << "row " << issue.row << ": " << issue.message << '\n';
    if (++shown == 20 && issues.size() > 20) {
      std::cerr << "... " << (issues.size() - shown) << " more\n";
      break;
    }
  }
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

void write_command_manifest(const std::string& primary_output, const std::string& command,
                            const std::string& config_json,
                            const std::vector<std::string>& outputs) {
  const auto dir = std::filesystem::path(primary_output).parent_path();
  RunManifest manifest(command, config_json);
  std::vector<std::string> rel;
  for (const auto& out : outputs) {
    rel.push_back(std::filesystem::path(out).filename().string());
  }
  manifest.complete_stage(command, rel, dir.empty() ? "." : dir.string());
  manifest.save(primary_output + ".manifest.json");
}

std::vector<TransactionRecord> load_transactions(const std::string& path) {
  auto parsed = read_transactions_csv_file(path);
  if (!parsed.ok()) {
    print_issues(parsed.issues);
    throw Error(errc::malformed_row, "transactions CSV failed validation: " + path);
  }
  auto validated = validate_records(std::move(parsed.records));
  if (!validated.ok()) {
    print_issues(validated.issues);
    throw Error(errc::malformed_row, "transaction records failed validation: " + path);
  }
  return std::move(validated.records);
}

std::vector<ScoredRecord> load_scored(const std::string& path) {
  auto parsed = read_scored_csv_file(path);
  if (!parsed.ok()) {
    print_issues(parsed.issues);
    throw Error(errc::malformed_row, "scored CSV failed validation: " + path);
  }
  return std::move(parsed.records);
}

struct GenerateArgs {
  std::string config_path;
  std::string out;
  GeneratorConfig config;
  bool seed_set = false;
  std::uint64_t seed = 0;
};

int cmd_generate(GenerateArgs& args) {
  if (!args.config_path.empty()) {
    args.config = generator_config_from_json(read_text_file(args.config_path));
  }
  if (args.seed_set) args.config.seed = args.seed;
  validate(args.config);
  const auto records = generate(args.config);
  write_transactions_csv_file(args.out, records);
  write_command_manifest(args.out, "generate", generator_config_to_json(args.config), {args.out});
  info("wrote " + std::to_string(records.size()) + " transactions to " + args.out);
  return kExitOk;
}

struct FeaturizeArgs {
  std::string input;
  std::string out;
  std::string config_path;
  std::string windows;
  double train_fraction = 0.4;
  bool unaware = false;
  double smoothing = -1.0;
};

int cmd_featurize(const FeaturizeArgs& args) {
  FeatureConfig config;
  if (!args.config_path.empty()) {
    config = feature_config_from_json(read_text_file(args.config_path));
  }
  if (!args.windows.empty()) {
    config.windows.clear();
    std::stringstream ss(args.windows);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) config.windows.push_back(parse_window(item));
    }
  }
  if (args.unaware) config.include_gender = false;
  if (args.smoothing >= 0.0) config.target_encoding_smoothing = args.smoothing;
  validate(config);

  const auto txns = load_transactions(args.input);
  const auto mask = train_mask_by_time(txns, args.train_fraction);
  const auto matrix = build_feature_matrix(txns, config, mask);
  write_feature_csv_file(args.out, matrix);

  nlohmann::ordered_json snapshot = nlohmann::ordered_json::parse(feature_config_to_json(config));
  snapshot["train_fraction"] = args.train_fraction;
  snapshot["input"] = args.input;
  write_command_manifest(args.out, "featurize", snapshot.dump(2) + "\n", {args.out});
  info("wrote " + std::to_string(matrix.rows.size()) + " feature rows (" +
       std::to_string(matrix.feature_names.size()) + " features) to " + args.out);
  return kExitOk;
}

struct DownsampleArgs {
  std::string input;
  std::string out;
  double target_rate = 0.0478;
  std::uint64_t seed = 1;
};

int cmd_downsample(const DownsampleArgs& args) {
  auto matrix = read_feature_csv_file(args.input);
  std::vector<FeatureRow> train_rows, test_rows;
  for (auto& row : matrix.rows) {
    (row.is_train ? train_rows : test_rows).push_back(std::move(row));
  }
  auto kept = downsample_negatives(train_rows, args.target_rate, args.seed);
  const std::size_t kept_train = kept.size();
  FeatureMatrix out;
  out.feature_names = matrix.feature_names;
  out.rows = std::move(kept);
  out.rows.insert(out.rows.end(), test_rows.begin(), test_rows.end());
  write_feature_csv_file(args.out, out);

  nlohmann::ordered_json snapshot{{"target_rate", args.target_rate},
                                  {"seed", args.seed},
                                  {"input", args.input}};
  write_command_manifest(args.out, "downsample", snapshot.dump(2) + "\n", {args.out});
  info("kept " + std::to_string(kept_train) + " train rows (+" +
       std::to_string(test_rows.size()) + " test rows passed through)");
  return kExitOk;
}

struct TrainArgs {
  std::string input;
  std::string out;
  TrainingConfig config;
  std::uint64_t seed = 1;
  bool no_class_weight = false;
};

int cmd_train(TrainArgs& args) {
  args.config.class_weight_balanced = !args.no_class_weight;
  const auto matrix = read_feature_csv_file(args.input);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (const auto& row : matrix.rows) {
    if (!row.is_train) continue;
    x.push_back(row.values);
    y.push_back(row.label);
  }
  const auto model = train(x, y, matrix.feature_names, args.config, args.seed);
  write_model_file(args.out, model);

  nlohmann::ordered_json snapshot{{"learning_rate", args.config.learning_rate},
                                  {"epochs", args.config.epochs},
                                  {"l2", args.config.l2},
                                  {"class_weight",
                                   args.config.class_weight_balanced ? "balanced" : "none"},
                                  {"seed", args.seed},
                                  {"input", args.input}};
  write_command_manifest(args.out, "train", snapshot.dump(2) + "\n", {args.out});
  info("trained on " + std::to_string(x.size()) + " rows; model written to " + args.out);
  return kExitOk;
}

struct ScoreArgs {
  std::string input;
  std::string model_path;
  std::string out;
  std::string partition = "test";
};

int cmd_score(const ScoreArgs& args) {
  const auto model = read_model_file(args.model_path);
  const auto matrix = read_feature_csv_file(args.input);
  if (matrix.feature_names != model.feature_names) {
    throw Error(errc::arity_mismatch, "feature CSV columns differ from the model's features");
  }
  std::vector<ScoredRecord> scored;
  for (const auto& row : matrix.rows) {
    if (args.partition == "train" && !row.is_train) continue;
    if (args.partition == "test" && row.is_train) continue;
    ScoredRecord s;
    s.score = score_one(model, row.values);
    s.label = row.label;
    s.group = row.group;
    s.value = row.value;
    s.card_id = row.card_id;
    scored.push_back(std::move(s));
  }
  write_scored_csv_file(args.out, scored);

  nlohmann::ordered_json snapshot{{"model", args.model_path},
                                  {"partition", args.partition},
                                  {"input", args.input}};
  write_command_manifest(args.out, "score", snapshot.dump(2) + "\n", {args.out});
  info("scored " + std::to_string(scored.size()) + " rows to " + args.out);
  return kExitOk;
}

struct AuditArgs {
  std::string input;
  std::string out;
  std::string csv_out;
  std::string mode = "global";
  double fp_ratio = 5.0;
  std::string fp_ratio_grid;
  double bias_threshold = 0.05;
  std::string metrics;
};

int cmd_audit(const AuditArgs& args) {
  AuditConfig config;
  const auto mode = audit_mode_from_string(args.mode);
  if (!mode) throw Error(errc::invalid_config, "mode must be 'global' or 'groupwise'");
  config.mode = *mode;
  config.global_fp_ratio = args.fp_ratio;
  if (!args.fp_ratio_grid.empty()) config.fp_ratio_grid = parse_double_list(args.fp_ratio_grid);
  config.policy.bias_threshold = args.bias_threshold;
  if (!args.metrics.empty()) {
    std::stringstream ss(args.metrics);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) config.enabled_metrics.push_back(item);
    }
  }
  validate(config);

  const auto records = load_scored(args.input);
  const auto report = config.mode == AuditMode::GlobalThreshold
                          ? audit_global(records, config)
                          : audit_groupwise(records, config);
  write_text_file(args.out, report_to_json(report));
  std::vector<std::string> outputs{args.out};
  if (!args.csv_out.empty()) {
    write_text_file(args.csv_out, report_to_flat_csv(report));
    outputs.push_back(args.csv_out);
  }

  nlohmann::ordered_json snapshot{{"mode", to_string(config.mode)},
                                  {"global_fp_ratio", config.global_fp_ratio},
                                  {"fp_ratio_grid", config.fp_ratio_grid},
                                  {"bias_threshold", config.policy.bias_threshold},
                                  {"input", args.input}};
  write_command_manifest(args.out, "audit", snapshot.dump(2) + "\n", outputs);

  const bool biased = any_significant_normalized(report);
  info(std::string("audit complete: ") + (biased ? "significant normalized parity found" : "no significant normalized parity"));
  return biased ? kExitBiasFound : kExitOk;
}

struct SummarizeArgs {
  std::string input;
  std::string out;
};

int cmd_summarize(const SummarizeArgs& args) {
  const auto txns = load_transactions(args.input);
  const auto json = summary_to_json(summarize(txns));
  if (args.out.empty()) {
    std::cout << json;
  } else {
    write_text_file(args.out, json);
    write_command_manifest(args.out, "summarize",
                           nlohmann::ordered_json{{"input", args.input}}.dump(2) + "\n",
                           {args.out});
  }
  return kExitOk;
}

struct PipelineArgs {
  std::string config_path;
  std::string out_dir;
  std::uint32_t n_seeds = 0;
  bool base_seed_set = false;
  std::uint64_t base_seed = 0;
};

int cmd_pipeline(const PipelineArgs& args) {
  PipelineConfig config;
  if (!args.config_path.empty()) {
    config = pipeline_config_from_json(read_text_file(args.config_path));
  }
  if (args.n_seeds > 0) config.n_seeds = args.n_seeds;
  if (args.base_seed_set) config.base_seed = args.base_seed;
  const auto result = run_pipeline(config, args.out_dir, [](const std::string& msg) {
    info(msg);
  });
  info("pipeline complete; manifest at " + result.manifest_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairaudit " + std::string(kToolVersion) +
               " - group-fairness audits for binary fraud classifiers"};
  app.require_subcommand(1);
  app.fallthrough();  // --quiet may follow the subcommand
  app.add_flag("--quiet", g_quiet, "suppress progress output");

  GenerateArgs generate_args;
  auto* generate = app.add_subcommand("generate", "generate a synthetic transaction CSV");
  generate->add_option("--config", generate_args.config_path, "generator config JSON");
  generate->add_option("--cards", generate_args.config.n_cards, "number of cards");
  generate->add_option("--days", generate_args.config.duration_days, "duration in days");
  generate->add_option("--txn-rate", generate_args.config.txn_rate, "mean txns/card/day");
  generate->add_option("--merchants", generate_args.config.n_merchants, "number of merchants");
  generate->add_option("--merchant-codes", generate_args.config.n_merchant_codes,
                       "number of merchant codes");
  generate->add_option("--gender-split", generate_args.config.gender_split, "fraction male");
  generate->add_option("--base-fraud-rate", generate_args.config.base_fraud_rate,
                       "per-transaction fraud probability anchor");
  generate->add_option("--gap", generate_args.config.fraud_rate_gender_gap,
                       "male fraud odds multiplier");
  generate->add_option("--proxy-strength", generate_args.config.proxy_strength,
                       "gender-merchant-code correlation in [0,1]");
  generate->add_option("--seed", generate_args.seed, "generator seed")
      ->each([&](const std::string&) { generate_args.seed_set = true; });
  generate->add_option("-o,--out", generate_args.out, "output CSV path")->required();

  FeaturizeArgs featurize_args;
  auto* featurize = app.add_subcommand("featurize", "build the feature matrix CSV");
  featurize->add_option("input", featurize_args.input, "transactions CSV")->required();
  featurize->add_option("--config", featurize_args.config_path, "feature config JSON");
  featurize->add_option("--windows", featurize_args.windows, "e.g. 1d,7d,30d");
  featurize->add_option("--train-fraction", featurize_args.train_fraction,
                        "temporal train split fraction");
  featurize->add_flag("--unaware", featurize_args.unaware, "exclude the gender feature");
  featurize->add_option("--smoothing", featurize_args.smoothing, "target encoding smoothing");
  featurize->add_option("-o,--out", featurize_args.out, "output feature CSV")->required();

  DownsampleArgs downsample_args;
  auto* downsample = app.add_subcommand("downsample",
                                        "downsample train-partition negatives to a fraud rate");
  downsample->add_option("input", downsample_args.input, "feature CSV")->required();
  downsample->add_option("--target-rate", downsample_args.target_rate, "target fraud rate");
  downsample->add_option("--seed", downsample_args.seed, "sampling seed");
  downsample->add_option("-o,--out", downsample_args.out, "output feature CSV")->required();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train the baseline logistic scorer");
  train_cmd->add_option("input", train_args.input, "feature CSV")->required();
  train_cmd->add_option("--learning-rate", train_args.config.learning_rate, "step size");
  train_cmd->add_option("--epochs", train_args.config.epochs, "epoch budget");
  train_cmd->add_option("--l2", train_args.config.l2, "L2 strength");
  train_cmd->add_flag("--no-class-weight", train_args.no_class_weight,
                      "disable balanced class weights");
  train_cmd->add_option("--seed", train_args.seed, "initialization seed");
  train_cmd->add_option("-o,--out", train_args.out, "output model JSON")->required();

  ScoreArgs score_args;
  auto* score_cmd = app.add_subcommand("score", "score feature rows with a model");
  score_cmd->add_option("input", score_args.input, "feature CSV")->required();
  score_cmd->add_option("--model", score_args.model_path, "model JSON")->required();
  score_cmd->add_option("--partition", score_args.partition, "test|train|all");
  score_cmd->add_option("-o,--out", score_args.out, "output scored CSV")->required();

  AuditArgs audit_args;
  auto* audit = app.add_subcommand("audit", "run a bias audit over a scored CSV");
  audit->add_option("input", audit_args.input, "scored CSV")->required();
  audit->add_option("--mode", audit_args.mode, "global|groupwise");
  audit->add_option("--fp-ratio", audit_args.fp_ratio, "global FP-ratio target");
  audit->add_option("--fp-ratio-grid", audit_args.fp_ratio_grid, "e.g. 5,2,1,0.5");
  audit->add_option("--bias-threshold", audit_args.bias_threshold, "significance threshold");
  audit->add_option("--metrics", audit_args.metrics, "comma list of enabled parity metrics");
  audit->add_option("-o,--out", audit_args.out, "output report JSON")->required();
  audit->add_option("--csv", audit_args.csv_out, "also write a flat parity CSV");

  SummarizeArgs summarize_args;
  auto* summarize_cmd = app.add_subcommand("summarize", "dataset statistics JSON");
  summarize_cmd->add_option("input", summarize_args.input, "transactions CSV")->required();
  summarize_cmd->add_option("-o,--out", summarize_args.out, "output JSON (stdout if omitted)");

  PipelineArgs pipeline_args;
  auto* pipeline = app.add_subcommand("pipeline",
                                      "end-to-end: generate, featurize, train, score, audit");
  pipeline->add_option("--config", pipeline_args.config_path, "pipeline config JSON");
  pipeline->add_option("--seeds", pipeline_args.n_seeds, "number of run seeds");
  pipeline->add_option("--seed", pipeline_args.base_seed, "base run seed")
      ->each([&](const std::string&) { pipeline_args.base_seed_set = true; });
  pipeline->add_option("-o,--out", pipeline_args.out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(generate_args);
    if (featurize->parsed()) return cmd_featurize(featurize_args);
    if (downsample->parsed()) return cmd_downsample(downsample_args);
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (score_cmd->parsed()) return cmd_score(score_args);
    if (audit->parsed()) return cmd_audit(audit_args);
    if (summarize_cmd->parsed()) return cmd_summarize(summarize_args);
    if (pipeline->parsed()) return cmd_pipeline(pipeline_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitUsage;
}
