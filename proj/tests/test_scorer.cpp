#include <doctest.h>

#include <cmath>

#include "fairaudit/metrics.hpp"
#include "fairaudit/rng.hpp"
#include "fairaudit/scorer.hpp"

using namespace fairaudit;

namespace {

struct Toy {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  std::vector<std::string> names;
};

Toy separable_fixture(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Toy toy;
  toy.names = {"f0", "f1"};
  for (std::size_t i = 0; i < n; ++i) {
    const int label = rng.bernoulli(0.4) ? 1 : 0;
    const double center = label == 1 ? 2.0 : -2.0;
    toy.x.push_back({center + 0.3 * rng.normal(), center + 0.3 * rng.normal()});
    toy.y.push_back(label);
  }
  return toy;
}

Toy random_fixture(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  Toy toy;
  for (std::size_t j = 0; j < dim; ++j) toy.names.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row;
    for (std::size_t j = 0; j < dim; ++j) row.push_back(rng.normal());
    toy.x.push_back(std::move(row));
    toy.y.push_back(rng.bernoulli(0.3) ? 1 : 0);
  }
  bool has_pos = false, has_neg = false;
  for (int y : toy.y) (y ? has_pos : has_neg) = true;
  if (!has_pos) toy.y[0] = 1;
  if (!has_neg) toy.y[1] = 0;
  return toy;
}

}  // namespace

TEST_CASE("downsampler hits the target rate") {
  std::vector<int> labels(100, 1);
  labels.insert(labels.end(), 99900, 0);
  const auto kept = downsample_negatives(labels, 0.0478, 3);
  // n' = 100 * (1 - r) / r = 1992.05 -> 1992 negatives
  CHECK(kept.size() == 100 + 1992);
  double pos = 0;
  for (auto i : kept) pos += labels[i];
  CHECK(pos == 100);
  const double rate = pos / static_cast<double>(kept.size());
  CHECK(std::fabs(rate - 0.0478) < 0.001);
}

TEST_CASE("downsampler is a fixed point at the target rate") {
  std::vector<int> labels;
  for (int i = 0; i < 10000; ++i) labels.push_back(i < 478 ? 1 : 0);
  const auto kept = downsample_negatives(labels, 0.0478, 3);
  CHECK(kept.size() == labels.size());
}

TEST_CASE("downsampler rejects an unreachable target") {
  std::vector<int> labels = {1, 1, 1, 0};
  CHECK_THROWS_AS((void)downsample_negatives(labels, 0.5, 1), Error);
  CHECK_THROWS_AS((void)downsample_negatives(labels, 0.0, 1), Error);
  CHECK_THROWS_AS((void)downsample_negatives(labels, 1.0, 1), Error);
}

TEST_CASE("downsampler is deterministic per seed") {
  std::vector<int> labels(50, 1);
  labels.insert(labels.end(), 5000, 0);
  CHECK(downsample_negatives(labels, 0.1, 7) == downsample_negatives(labels, 0.1, 7));
  CHECK(downsample_negatives(labels, 0.1, 7) != downsample_negatives(labels, 0.1, 8));
}

TEST_CASE("downsampler accuracy across input shapes") {
  Rng rng(91);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n_pos = 1000 + rng.below(5000);
    const std::size_t n_neg = n_pos * (20 + rng.below(100));
    std::vector<int> labels(n_pos, 1);
    labels.insert(labels.end(), n_neg, 0);
    const auto kept = downsample_negatives(labels, 0.0478, trial);
    double pos = 0;
    for (auto i : kept) pos += labels[i];
    const double rate = pos / static_cast<double>(kept.size());
    CHECK(std::fabs(rate - 0.0478) < 0.001);  // within 0.1pp
  }
}

TEST_CASE("training a separable fixture reaches accuracy 1.0") {
  const auto toy = separable_fixture(400, 5);
  TrainingConfig config;
  config.epochs = 500;
  const auto model = train(toy.x, toy.y, toy.names, config, 5);
  const auto scores = score(model, toy.x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    correct += (scores[i] >= 0.5) == (toy.y[i] == 1);
  }
  CHECK(correct == toy.x.size());
}

TEST_CASE("zero epochs leave the initialization: scores near the base rate") {
  Rng rng(6);
  Toy toy;
  toy.names = {"f0"};
  for (int i = 0; i < 1000; ++i) {
    toy.x.push_back({rng.normal()});
    toy.y.push_back(i < 150 ? 1 : 0);
  }
  TrainingConfig config;
  config.epochs = 0;
  const auto model = train(toy.x, toy.y, toy.names, config, 9);
  const auto scores = score(model, toy.x);
  for (double s : scores) CHECK(s == doctest::Approx(0.15).epsilon(0.1));
}

TEST_CASE("training rejects single-class data") {
  Toy toy;
  toy.names = {"f0"};
  toy.x = {{1.0}, {2.0}};
  toy.y = {1, 1};
  CHECK_THROWS_AS((void)train(toy.x, toy.y, toy.names, TrainingConfig{}, 1), Error);
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    auto toy = random_fixture(60, 4, 100 + trial);
    TrainingConfig config;
    config.epochs = 3;
    auto model = train(toy.x, toy.y, toy.names, config, trial);
    const auto grad = training_gradient(model, toy.x, toy.y);
    const double h = 1e-6;
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
      auto plus = model, minus = model;
      plus.weights[j] += h;
      minus.weights[j] -= h;
      const double fd =
          (training_loss(plus, toy.x, toy.y) - training_loss(minus, toy.x, toy.y)) / (2.0 * h);
      const double denom = std::max(std::fabs(fd), 1e-8);
      CHECK(std::fabs(grad.weights[j] - fd) / denom < 1e-5);
    }
    auto plus = model, minus = model;
    plus.bias += h;
    minus.bias -= h;
    const double fd_b =
        (training_loss(plus, toy.x, toy.y) - training_loss(minus, toy.x, toy.y)) / (2.0 * h);
    CHECK(std::fabs(grad.bias - fd_b) / std::max(std::fabs(fd_b), 1e-8) < 1e-5);
  }
}

TEST_CASE("gradient vanishes near a converged optimum on a small problem") {
  auto toy = random_fixture(80, 2, 55);
  TrainingConfig config;
  config.epochs = 5000;
  config.l2 = 1e-2;  // strongly convex, converges tightly
  const auto model = train(toy.x, toy.y, toy.names, config, 2);
  const auto grad = training_gradient(model, toy.x, toy.y);
  for (double g : grad.weights) CHECK(std::fabs(g) < 1e-6);
  CHECK(std::fabs(grad.bias) < 1e-6);
}

TEST_CASE("epochwise training loss is non-increasing at the default rate") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    auto toy = random_fixture(150, 5, 200 + seed);
    TrainingConfig config;
    double prev = std::numeric_limits<double>::infinity();
    for (int epochs = 0; epochs <= 60; epochs += 10) {
      config.epochs = epochs;
      const auto model = train(toy.x, toy.y, toy.names, config, seed);
      const double loss = training_loss(model, toy.x, toy.y);
      CHECK(loss <= prev + 1e-12);
      prev = loss;
    }
  }
}

TEST_CASE("shifting a feature leaves converged rankings unchanged") {
  const auto toy = separable_fixture(300, 8);
  TrainingConfig config;
  config.epochs = 800;
  const auto model_a = train(toy.x, toy.y, toy.names, config, 3);
  auto shifted = toy;
  for (auto& row : shifted.x) row[0] += 100.0;
  const auto model_b = train(shifted.x, shifted.y, toy.names, config, 3);

  auto to_records = [&](const std::vector<double>& scores) {
    std::vector<ScoredRecord> records;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      ScoredRecord r;
      r.score = scores[i];
      r.label = toy.y[i];
      records.push_back(r);
    }
    return records;
  };
  const auto auc_a = roc_auc(to_records(score(model_a, toy.x)));
  const auto auc_b = roc_auc(to_records(score(model_b, shifted.x)));
  CHECK(std::fabs(*auc_a - *auc_b) < 1e-6);
}

TEST_CASE("scoring is pure and pointwise") {
  const auto toy = separable_fixture(50, 11);
  const auto model = train(toy.x, toy.y, toy.names, TrainingConfig{}, 4);
  auto rows = toy.x;
  rows.push_back(rows.front());  // duplicate row duplicates its score
  const auto scores = score(model, rows);
  CHECK(scores.back() == scores.front());
  for (double s : scores) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("arity mismatches are rejected") {
  const auto toy = separable_fixture(50, 13);
  const auto model = train(toy.x, toy.y, toy.names, TrainingConfig{}, 4);
  std::vector<std::vector<double>> bad = {{1.0, 2.0, 3.0}};
  CHECK_THROWS_AS((void)score(model, bad), Error);
}

TEST_CASE("model json round-trips bit-exactly") {
  const auto toy = separable_fixture(120, 19);
  const auto model = train(toy.x, toy.y, toy.names, TrainingConfig{}, 21);
  const auto text = model_to_json(model);
  const auto parsed = model_from_json(text);
  CHECK(parsed.weights == model.weights);
  CHECK(parsed.bias == model.bias);
  CHECK(parsed.scaler_mean == model.scaler_mean);
  CHECK(parsed.scaler_std == model.scaler_std);
  CHECK(parsed.feature_names == model.feature_names);
  CHECK(parsed.seed == model.seed);
  const auto rescored = score(parsed, toy.x);
  const auto original = score(model, toy.x);
  CHECK(rescored == original);
}

TEST_CASE("training is deterministic per seed") {
  const auto toy = separable_fixture(200, 29);
  const auto a = train(toy.x, toy.y, toy.names, TrainingConfig{}, 5);
  const auto b = train(toy.x, toy.y, toy.names, TrainingConfig{}, 5);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
  const auto c = train(toy.x, toy.y, toy.names, TrainingConfig{}, 6);
  CHECK(a.weights != c.weights);
}
