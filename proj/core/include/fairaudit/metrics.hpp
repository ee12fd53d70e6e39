#pragma once

#include <optional>
#include <span>

#include "fairaudit/types.hpp"

namespace fairaudit {

struct ThresholdSearchResult {
  double threshold = 0.0;
  double achieved_fp_ratio = 0.0;
  double tpr_at_threshold = 0.0;
  bool feasible = false;
};

// Predicted fraud iff score >= threshold. tp_value/fn_value accumulate the
// record values of caught and missed frauds.
ConfusionCounts confusion_counts(std::span<const ScoredRecord> records, double threshold);

// Rates from counts; any zero denominator yields nullopt for that field.
UtilityMetrics utility_metrics(const ConfusionCounts& counts);

// FP/TP at a threshold; nullopt when tp == 0.
std::optional<double> fp_ratio(const ConfusionCounts& counts);

// Probability that a random positive outscores a random negative, ties at half
// credit. Sort-and-rank, O(n log n). nullopt if either class is absent.
std::optional<double> roc_auc(std::span<const ScoredRecord> records);

// Average precision: mean over positives of precision at each positive's rank
// in descending-score order; ties broken by (score desc, label desc, stable
// input order). nullopt if there are no positives.
std::optional<double> pr_auc(std::span<const ScoredRecord> records);

// Sweeps the distinct scores in descending order and returns the threshold
// maximizing TPR subject to FP/TP <= target (ties resolved to the highest
// threshold). If no threshold satisfies the constraint, returns the
// all-positive threshold's stats with feasible = false.
// Throws Error(no_positives) when the input has no positive labels.
ThresholdSearchResult threshold_for_fp_ratio(std::span<const ScoredRecord> records, double target);

// Utility at the threshold found for the target ratio; nullopt when the
// target is infeasible.
std::optional<double> tpr_at_fp_ratio(std::span<const ScoredRecord> records, double target);
std::optional<double> vdr_at_fp_ratio(std::span<const ScoredRecord> records, double target);

}  // namespace fairaudit
