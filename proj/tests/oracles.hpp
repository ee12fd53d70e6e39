#pragma once

// Independent brute-force oracles for the rank statistics and threshold
// search. Deliberately naive; they share no code with the library internals
// they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairaudit/metrics.hpp"
#include "fairaudit/rng.hpp"
#include "fairaudit/types.hpp"

namespace oracle {

using fairaudit::Rng;
using fairaudit::ScoredRecord;

// Pairwise positive-vs-negative comparison, ties at half credit.
inline std::optional<double> roc_auc_pairwise(std::span<const ScoredRecord> records) {
  double wins = 0.0;
  std::uint64_t pairs = 0;
  for (const auto& p : records) {
    if (p.label != 1) continue;
    for (const auto& n : records) {
      if (n.label != 0) continue;
      ++pairs;
      if (p.score > n.score) wins += 1.0;
      else if (p.score == n.score) wins += 0.5;
    }
  }
  bool has_pos = false, has_neg = false;
  for (const auto& r : records) (r.label == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) return std::nullopt;
  return wins / static_cast<double>(pairs);
}

// Rank-by-rank average precision; precision recomputed from scratch at every
// positive's rank.
inline std::optional<double> average_precision_naive(std::span<const ScoredRecord> records) {
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].score != records[b].score) return records[a].score > records[b].score;
    return records[a].label > records[b].label;
  });
  std::uint64_t n_pos = 0;
  for (const auto& r : records) n_pos += (r.label == 1);
  if (n_pos == 0) return std::nullopt;
  double sum = 0.0;
  for (std::size_t rank = 1; rank <= order.size(); ++rank) {
    if (records[order[rank - 1]].label != 1) continue;
    std::uint64_t tp = 0;
    for (std::size_t k = 0; k < rank; ++k) tp += (records[order[k]].label == 1);
    sum += static_cast<double>(tp) / static_cast<double>(rank);
  }
  return sum / static_cast<double>(n_pos);
}

struct EnumResult {
  double threshold = 0.0;
  double achieved_fp_ratio = 0.0;
  double tpr = 0.0;
  bool feasible = false;
};

// Exhaustive enumeration over every distinct score as a candidate threshold:
// max TPR subject to FP/TP <= target, ties resolved to the highest threshold.
inline EnumResult threshold_enumeration(std::span<const ScoredRecord> records, double target) {
  std::vector<double> candidates;
  for (const auto& r : records) candidates.push_back(r.score);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::uint64_t n_pos = 0;
  for (const auto& r : records) n_pos += (r.label == 1);

  EnumResult best;
  EnumResult all_positive;
  bool found = false;
  for (double tau : candidates) {
    std::uint64_t tp = 0, fp = 0;
    for (const auto& r : records) {
      if (r.score >= tau) (r.label == 1 ? tp : fp)++;
    }
    if (tp == 0) continue;
    const double ratio = static_cast<double>(fp) / static_cast<double>(tp);
    const double tpr = static_cast<double>(tp) / static_cast<double>(n_pos);
    if (tau == candidates.front()) all_positive = {tau, ratio, tpr, false};
    if (ratio <= target) {
      if (!found || tpr > best.tpr || (tpr == best.tpr && tau > best.threshold)) {
        best = {tau, ratio, tpr, true};
        found = true;
      }
    }
  }
  return found ? best : all_positive;
}

// Naive full-scan rolling window: same key, time strictly inside (t-w, t).
// Sums at cent resolution, matching the library's value-sum contract.
inline std::pair<double, double> rolling_naive(std::span<const std::int64_t> timestamps,
                                               std::span<const double> values,
                                               std::span<const std::uint32_t> keys,
                                               std::size_t row, std::int64_t window) {
  double count = 0.0;
  std::int64_t cents = 0;
  for (std::size_t j = 0; j < timestamps.size(); ++j) {
    if (j == row || keys[j] != keys[row]) continue;
    if (timestamps[j] > timestamps[row] - window && timestamps[j] < timestamps[row]) {
      count += 1.0;
      cents += std::llround(values[j] * 100.0);
    }
  }
  return {count, static_cast<double>(cents) / 100.0};
}

// Random instance with deliberately tie-prone scores (drawn from a small
// grid) and a random positive rate.
inline std::vector<ScoredRecord> random_instance(Rng& rng, std::size_t max_n,
                                                 std::size_t score_grid = 0) {
  const std::size_t n = 1 + rng.below(max_n);
  const double pos_rate = 0.05 + 0.9 * rng.uniform();
  const std::size_t grid = score_grid ? score_grid : 1 + rng.below(2 * n);
  std::vector<ScoredRecord> records(n);
  for (auto& r : records) {
    r.score = static_cast<double>(rng.below(grid)) / static_cast<double>(grid);
    r.label = rng.bernoulli(pos_rate) ? 1 : 0;
    r.group = rng.bernoulli(0.5) ? fairaudit::Gender::Male : fairaudit::Gender::Female;
    r.value = 1.0 + 99.0 * rng.uniform();
  }
  return records;
}

}  // namespace oracle
