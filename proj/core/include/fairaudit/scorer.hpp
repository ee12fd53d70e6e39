#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairaudit/features.hpp"
#include "fairaudit/types.hpp"

namespace fairaudit {

struct TrainingConfig {
  double learning_rate = 0.1;
  int epochs = 300;
  double l2 = 1e-4;
  bool class_weight_balanced = true;  // weights inversely proportional to class frequency
};

struct ScorerModel {
  std::vector<std::string> feature_names;
  std::vector<double> weights;  // one per feature
  double bias = 0.0;
  std::vector<double> scaler_mean;
  std::vector<double> scaler_std;
  TrainingConfig config;
  std::uint64_t seed = 0;
};

// Keeps every positive and a seeded uniform subsample of negatives sized so
// the resulting fraud rate lands within 0.1pp of the target. Returns kept row
// indices in ascending order. Throws Error(target_unreachable) when the input
// rate already exceeds the target and Error(invalid_config) on a target
// outside (0,1).
std::vector<std::size_t> downsample_negatives(std::span<const int> labels,
                                              double target_fraud_rate, std::uint64_t seed);
std::vector<FeatureRow> downsample_negatives(const std::vector<FeatureRow>& rows,
                                             double target_fraud_rate, std::uint64_t seed);

// Class-weighted logistic regression with L2 penalty, trained by full-batch
// gradient descent on internally standardized features. The bias starts at
// the log-odds of the base rate and the weights at small seeded noise, so a
// zero-epoch model scores everything near the base rate. A step that would
// increase the loss is retried with a halved rate, keeping the epochwise loss
// non-increasing. Throws Error(single_class) without both classes and
// Error(non_finite_loss) if the loss leaves the finite range.
ScorerModel train(std::span<const std::vector<double>> features, std::span<const int> labels,
                  std::vector<std::string> feature_names, const TrainingConfig& config,
                  std::uint64_t seed);

// Logistic scores in [0,1]. Throws Error(arity_mismatch) when a row's width
// differs from the model's feature count.
std::vector<double> score(const ScorerModel& model,
                          std::span<const std::vector<double>> features);
double score_one(const ScorerModel& model, const std::vector<double>& features);

// Class-weighted cross-entropy plus L2 penalty on raw (unscaled-by-model)
// inputs; exposed for gradient checks.
double training_loss(const ScorerModel& model, std::span<const std::vector<double>> features,
                     std::span<const int> labels);

struct LossGradient {
  std::vector<double> weights;
  double bias = 0.0;
};
LossGradient training_gradient(const ScorerModel& model,
                               std::span<const std::vector<double>> features,
                               std::span<const int> labels);

std::string model_to_json(const ScorerModel& model);
ScorerModel model_from_json(const std::string& json_text);
void write_model_file(const std::string& path, const ScorerModel& model);
ScorerModel read_model_file(const std::string& path);

}  // namespace fairaudit
