#include "fairaudit/scorer.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "fairaudit/csv.hpp"
#include "fairaudit/rng.hpp"
#include "fairaudit/version.hpp"

namespace fairaudit {

namespace {

double softplus_neg(double z) {
  // log(1 + exp(-z)) without overflow.
  if (z > 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Problem {
  std::vector<std::vector<double>> x;  // standardized
  std::vector<double> sample_weight;
  double weight_sum = 0.0;
};

Problem standardize(const ScorerModel& model, std::span<const std::vector<double>> features,
                    std::span<const int> labels) {
  const auto scaler = StandardScaler::from_params(model.scaler_mean, model.scaler_std);
  Problem p;
  p.x.reserve(features.size());
  for (const auto& row : features) {
    if (row.size() != model.weights.size()) {
      throw Error(errc::arity_mismatch, "feature row width differs from model");
    }
    p.x.push_back(scaler.apply(row));
  }
  double n_pos = 0.0;
  for (int y : labels) n_pos += y;
  const double n = static_cast<double>(labels.size());
  const double w_pos =
      model.config.class_weight_balanced && n_pos > 0.0 ? n / (2.0 * n_pos) : 1.0;
  const double w_neg = model.config.class_weight_balanced && n - n_pos > 0.0
                           ? n / (2.0 * (n - n_pos))
                           : 1.0;
  p.sample_weight.reserve(labels.size());
  for (int y : labels) {
    const double w = y == 1 ? w_pos : w_neg;
    p.sample_weight.push_back(w);
    p.weight_sum += w;
  }
  return p;
}

double loss_of(const Problem& p, std::span<const int> labels,
               const std::vector<double>& weights, double bias, double l2) {
  double ce = 0.0;
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * p.x[i][j];
    ce += p.sample_weight[i] * (softplus_neg(z) + (labels[i] == 1 ? 0.0 : z));
  }
  double penalty = 0.0;
  for (double w : weights) penalty += w * w;
  return ce / p.weight_sum + 0.5 * l2 * penalty;
}

void gradient_of(const Problem& p, std::span<const int> labels,
                 const std::vector<double>& weights, double bias, double l2,
                 std::vector<double>& grad_w, double& grad_b) {
  grad_w.assign(weights.size(), 0.0);
  grad_b = 0.0;
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * p.x[i][j];
    const double residual = p.sample_weight[i] * (sigmoid(z) - (labels[i] == 1 ? 1.0 : 0.0));
    for (std::size_t j = 0; j < weights.size(); ++j) grad_w[j] += residual * p.x[i][j];
    grad_b += residual;
  }
  for (std::size_t j = 0; j < weights.size(); ++j) {
    grad_w[j] = grad_w[j] / p.weight_sum + l2 * weights[j];
  }
  grad_b /= p.weight_sum;
}

}  // namespace

std::vector<std::size_t> downsample_negatives(std::span<const int> labels,
                                              double target_fraud_rate, std::uint64_t seed) {
  if (!(target_fraud_rate > 0.0) || !(target_fraud_rate < 1.0)) {
    throw Error(errc::invalid_config, "target fraud rate must be in (0,1)");
  }
  std::vector<std::size_t> positives, negatives;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == 1 ? positives : negatives).push_back(i);
  }
  const double p = static_cast<double>(positives.size());
  if (labels.empty() || positives.empty()) {
    throw Error(errc::target_unreachable, "no positives to anchor the target rate");
  }
  const double input_rate = p / static_cast<double>(labels.size());
  if (input_rate > target_fraud_rate) {
    throw Error(errc::target_unreachable, "input fraud rate already above target");
  }
  const auto want = static_cast<std::size_t>(
      std::llround(p * (1.0 - target_fraud_rate) / target_fraud_rate));
  const std::size_t keep = std::min(want, negatives.size());

  // Partial Fisher-Yates over the negative indices; first `keep` slots win.
  Rng rng(derive_seed(seed, 0x646f776eULL));
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(negatives.size() - i));
    std::swap(negatives[i], negatives[j]);
  }
  std::vector<std::size_t> kept(positives);
  kept.insert(kept.end(), negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<FeatureRow> downsample_negatives(const std::vector<FeatureRow>& rows,
                                             double target_fraud_rate, std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (const auto& r : rows) labels.push_back(r.label);
  std::vector<FeatureRow> out;
  for (std::size_t i : downsample_negatives(labels, target_fraud_rate, seed)) {
    out.push_back(rows[i]);
  }
  return out;
}

ScorerModel train(std::span<const std::vector<double>> features, std::span<const int> labels,
                  std::vector<std::string> feature_names, const TrainingConfig& config,
                  std::uint64_t seed) {
  if (features.size() != labels.size() || features.empty()) {
    throw Error(errc::empty_training, "training data empty or misaligned");
  }
  std::uint64_t n_pos = 0;
  for (int y : labels) n_pos += (y == 1);
  if (n_pos == 0 || n_pos == labels.size()) {
    throw Error(errc::single_class, "training data must contain both classes");
  }
  const std::size_t dim = features.front().size();
  if (feature_names.size() != dim) {
    throw Error(errc::arity_mismatch, "feature name count differs from feature width");
  }

  ScorerModel model;
  model.feature_names = std::move(feature_names);
  model.config = config;
  model.seed = seed;
  const auto scaler = StandardScaler::fit(features);
  model.scaler_mean = scaler.means();
  model.scaler_std = scaler.stds();

  const double base_rate = static_cast<double>(n_pos) / static_cast<double>(labels.size());
  model.bias = std::log(base_rate / (1.0 - base_rate));
  Rng rng(derive_seed(seed, 0x747261696eULL));
  model.weights.resize(dim);
  for (auto& w : model.weights) w = (rng.uniform() - 0.5) * 0.02;

  const auto problem = standardize(model, features, labels);
  double loss = loss_of(problem, labels, model.weights, model.bias, config.l2);
  if (!std::isfinite(loss)) throw Error(errc::non_finite_loss, "initial loss not finite");

  std::vector<double> grad_w;
  double grad_b = 0.0;
  double step = config.learning_rate;
  std::vector<double> next_w(dim);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    gradient_of(problem, labels, model.weights, model.bias, config.l2, grad_w, grad_b);
    bool accepted = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      for (std::size_t j = 0; j < dim; ++j) next_w[j] = model.weights[j] - step * grad_w[j];
      const double next_b = model.bias - step * grad_b;
      const double next_loss = loss_of(problem, labels, next_w, next_b, config.l2);
      if (!std::isfinite(next_loss)) throw Error(errc::non_finite_loss, "loss left finite range");
      if (next_loss <= loss) {
        model.weights = next_w;
        model.bias = next_b;
        loss = next_loss;
        accepted = true;
        break;
      }
      step *= 0.5;  // backtrack; keeps the epochwise loss non-increasing
    }
    if (!accepted) break;  // no descent direction at float resolution
  }
  return model;
}

double score_one(const ScorerModel& model, const std::vector<double>& features) {
  if (features.size() != model.weights.size()) {
    throw Error(errc::arity_mismatch, "feature row width differs from model");
  }
  double z = model.bias;
  for (std::size_t j = 0; j < features.size(); ++j) {
    const double sd = model.scaler_std[j];
    const double x = sd == 0.0 ? 0.0 : (features[j] - model.scaler_mean[j]) / sd;
    z += model.weights[j] * x;
  }
  return sigmoid(z);
}

std::vector<double> score(const ScorerModel& model,
                          std::span<const std::vector<double>> features) {
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto& row : features) out.push_back(score_one(model, row));
  return out;
}

double training_loss(const ScorerModel& model, std::span<const std::vector<double>> features,
                     std::span<const int> labels) {
  const auto problem = standardize(model, features, labels);
  return loss_of(problem, labels, model.weights, model.bias, model.config.l2);
}

LossGradient training_gradient(const ScorerModel& model,
                               std::span<const std::vector<double>> features,
                               std::span<const int> labels) {
  const auto problem = standardize(model, features, labels);
  LossGradient g;
  gradient_of(problem, labels, model.weights, model.bias, model.config.l2, g.weights, g.bias);
  return g;
}

std::string model_to_json(const ScorerModel& model) {
  nlohmann::ordered_json j;
  j["schema"] = "fairaudit.scorer_model.v1";
  j["tool_version"] = kToolVersion;
  j["feature_names"] = model.feature_names;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["scaler"] = {{"mean", model.scaler_mean}, {"std", model.scaler_std}};
  j["training_config"] = {{"learning_rate", model.config.learning_rate},
                          {"epochs", model.config.epochs},
                          {"l2", model.config.l2},
                          {"class_weight", model.config.class_weight_balanced ? "balanced" : "none"}};
  j["seed"] = model.seed;
  j["metadata"] = {{"early_stopping", "none (fixed epoch budget)"}};
  return j.dump(2) + "\n";
}

ScorerModel model_from_json(const std::string& json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    ScorerModel model;
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.weights = j.at("weights").get<std::vector<double>>();
    model.bias = j.at("bias").get<double>();
    model.scaler_mean = j.at("scaler").at("mean").get<std::vector<double>>();
    model.scaler_std = j.at("scaler").at("std").get<std::vector<double>>();
    model.config.learning_rate = j.at("training_config").at("learning_rate").get<double>();
    model.config.epochs = j.at("training_config").at("epochs").get<int>();
    model.config.l2 = j.at("training_config").at("l2").get<double>();
    model.config.class_weight_balanced =
        j.at("training_config").at("class_weight").get<std::string>() == "balanced";
    model.seed = j.at("seed").get<std::uint64_t>();
    if (model.weights.size() != model.feature_names.size() ||
        model.scaler_mean.size() != model.weights.size() ||
        model.scaler_std.size() != model.weights.size()) {
      throw Error(errc::arity_mismatch, "model JSON arity mismatch");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::malformed_row, std::string("bad model JSON: ") + e.what());
  }
}

void write_model_file(const std::string& path, const ScorerModel& model) {
  write_text_file(path, model_to_json(model));
}

ScorerModel read_model_file(const std::string& path) {
  return model_from_json(read_text_file(path));
}

}  // namespace fairaudit
