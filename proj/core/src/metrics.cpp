#include "fairaudit/metrics.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace fairaudit {

namespace {

std::optional<double> ratio_of(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

}  // namespace

ConfusionCounts confusion_counts(std::span<const ScoredRecord> records, double threshold) {
  ConfusionCounts c;
  for (const auto& r : records) {
    const bool predicted = r.score >= threshold;
    if (r.label == 1) {
      if (predicted) {
        ++c.tp;
        c.tp_value += r.value;
      } else {
        ++c.fn;
        c.fn_value += r.value;
      }
    } else {
      if (predicted) ++c.fp;
      else ++c.tn;
    }
  }
  return c;
}

UtilityMetrics utility_metrics(const ConfusionCounts& c) {
  UtilityMetrics m;
  const double tp = static_cast<double>(c.tp);
  const double fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn);
  const double fn = static_cast<double>(c.fn);
  m.tpr = ratio_of(tp, tp + fn);
  m.fpr = ratio_of(fp, fp + tn);
  m.ppv = ratio_of(tp, tp + fp);
  m.npv = ratio_of(tn, tn + fn);
  if (m.ppv && m.tpr) {
    m.f1 = ratio_of(2.0 * *m.ppv * *m.tpr, *m.ppv + *m.tpr);
  }
  m.predicted_positive_rate = ratio_of(tp + fp, tp + fp + tn + fn);
  m.vdr = ratio_of(c.tp_value, c.tp_value + c.fn_value);
  return m;
}

std::optional<double> fp_ratio(const ConfusionCounts& c) {
  if (c.tp == 0) return std::nullopt;
  return static_cast<double>(c.fp) / static_cast<double>(c.tp);
}

std::optional<double> roc_auc(std::span<const ScoredRecord> records) {
  const std::size_t n = records.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].score < records[b].score;
  });

  std::uint64_t n_pos = 0, n_neg = 0;
  for (const auto& r : records) (r.label == 1 ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  // Rank-sum of positives with average ranks over tied score runs.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && records[order[j]].score == records[order[i]].score) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (records[order[k]].label == 1) pos_rank_sum += avg_rank;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

std::optional<double> pr_auc(std::span<const ScoredRecord> records) {
  const std::size_t n = records.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].score != records[b].score) return records[a].score > records[b].score;
    return records[a].label > records[b].label;
  });

  std::uint64_t n_pos = 0;
  for (const auto& r : records) n_pos += (r.label == 1);
  if (n_pos == 0) return std::nullopt;

  double sum = 0.0;
  std::uint64_t tp = 0;
  for (std::size_t rank = 1; rank <= n; ++rank) {
    if (records[order[rank - 1]].label == 1) {
      ++tp;
      sum += static_cast<double>(tp) / static_cast<double>(rank);
    }
  }
  return sum / static_cast<double>(n_pos);
}

ThresholdSearchResult threshold_for_fp_ratio(std::span<const ScoredRecord> records, double target) {
  std::uint64_t n_pos = 0;
  for (const auto& r : records) n_pos += (r.label == 1);
  if (n_pos == 0) throw Error(errc::no_positives, "threshold_for_fp_ratio requires >= 1 positive");

  const std::size_t n = records.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].score > records[b].score;
  });

  // Cumulative counts over the descending score sweep: after processing a
  // distinct-score run, (tp, fp) are the counts at threshold = that score.
  ThresholdSearchResult best;
  ThresholdSearchResult last;  // the all-positive threshold (lowest distinct score)
  bool found = false;
  std::uint64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < n) {
    const double threshold = records[order[i]].score;
    std::size_t j = i;
    while (j < n && records[order[j]].score == threshold) {
      (records[order[j]].label == 1 ? tp : fp)++;
      ++j;
    }
    const double tpr = static_cast<double>(tp) / static_cast<double>(n_pos);
    if (tp > 0) {
      const double ratio = static_cast<double>(fp) / static_cast<double>(tp);
      last = {threshold, ratio, tpr, false};
      if (ratio <= target && (!found || tpr > best.tpr_at_threshold)) {
        best = {threshold, ratio, tpr, true};
        found = true;
      }
    }
    i = j;
  }
  return found ? best : last;
}

std::optional<double> tpr_at_fp_ratio(std::span<const ScoredRecord> records, double target) {
  const auto result = threshold_for_fp_ratio(records, target);
  if (!result.feasible) return std::nullopt;
  return result.tpr_at_threshold;
}

std::optional<double> vdr_at_fp_ratio(std::span<const ScoredRecord> records, double target) {
  const auto result = threshold_for_fp_ratio(records, target);
  if (!result.feasible) return std::nullopt;
  return utility_metrics(confusion_counts(records, result.threshold)).vdr;
}

}  // namespace fairaudit
