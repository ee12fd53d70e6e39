#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairaudit/metrics.hpp"
#include "fairaudit/parity.hpp"
#include "fairaudit/types.hpp"

namespace fairaudit {

enum class AuditMode { GlobalThreshold, GroupwiseThreshold };

const char* to_string(AuditMode mode);
std::optional<AuditMode> audit_mode_from_string(std::string_view name);

// Parity families computed by each audit regime, in report order.
const std::vector<std::string>& global_metric_names();
const std::vector<std::string>& groupwise_metric_names();

struct AuditConfig {
  AuditMode mode = AuditMode::GlobalThreshold;
  double global_fp_ratio = 5.0;
  std::vector<double> fp_ratio_grid = {5.0, 2.0, 1.0, 0.5};
  BiasPolicy policy;
  // Empty means every metric family of the selected mode.
  std::vector<std::string> enabled_metrics;
};

// Throws Error(invalid_config) on a non-positive ratio, duplicate grid
// entries, or an unknown enabled metric.
void validate(const AuditConfig& config);

struct GroupStats {
  std::uint64_t n_records = 0;
  std::uint64_t n_positives = 0;
  std::optional<double> fraud_rate;
};

struct DatasetStats {
  std::uint64_t n_records = 0;
  PerGroup<GroupStats> per_group;
  std::optional<ParityValue> true_fraud_rate_parity;
};

struct GroupAuc {
  std::optional<double> roc_auc;
  std::optional<double> pr_auc;
};

struct GroupwiseGridPoint {
  double fp_ratio_target = 0.0;
  PerGroup<std::optional<ThresholdSearchResult>> search;  // nullopt: group had no positives
  PerGroup<UtilityMetrics> utilities;                     // at that group's threshold
  std::vector<ParityValue> parities;
};

struct AggregateStat {
  std::optional<double> mean;
  std::optional<double> std_dev;  // population standard deviation
  std::uint32_t excluded = 0;     // runs whose value was Undefined
};

struct RunAggregateEntry {
  std::string metric_name;
  std::optional<double> fp_ratio_target;  // set for groupwise grid parities
  AggregateStat raw;
  AggregateStat normalized;
};

struct RunAggregate {
  std::uint32_t n_runs = 0;
  std::vector<RunAggregateEntry> parities;
};

struct AuditReport {
  AuditMode mode = AuditMode::GlobalThreshold;
  BiasPolicy policy;
  std::vector<double> fp_ratio_targets;

  // GlobalThreshold fields.
  std::optional<ThresholdSearchResult> global_search;
  PerGroup<UtilityMetrics> per_group_utilities;
  PerGroup<GroupAuc> per_group_auc;
  PerGroup<std::optional<double>> per_group_fp_ratio;  // at the global threshold

  // GroupwiseThreshold fields.
  std::vector<GroupwiseGridPoint> grid;

  // Both modes. Groupwise reports flatten the grid parities in grid order.
  std::vector<ParityValue> parities;
  DatasetStats dataset_stats;
  std::optional<RunAggregate> run_aggregate;
};

// Partition preserving input order; groups absent from the data are empty.
PerGroup<std::vector<ScoredRecord>> split_by_group(std::span<const ScoredRecord> records);

DatasetStats compute_dataset_stats(std::span<const ScoredRecord> records, const BiasPolicy& policy);

// One pooled threshold at config.global_fp_ratio, per-group utilities and
// AUCs at that threshold, all enabled parity families, dataset stats.
// Throws Error(no_positives) when the pooled records have no positives.
AuditReport audit_global(std::span<const ScoredRecord> records, const AuditConfig& config);

// Per grid ratio: a per-group threshold, per-group utilities at it, and the
// TPR/VDR parity families. A group without positives contributes Undefined.
AuditReport audit_groupwise(std::span<const ScoredRecord> records, const AuditConfig& config);

// Parity of the per-group true fraud rates. Throws Error(empty_group) when a
// group has no records.
ParityValue dataset_bias(std::span<const ScoredRecord> records,
                         const BiasPolicy& policy = BiasPolicy{});

// Per-parity mean and population standard deviation across runs; Undefined
// values are excluded and counted. The result is the first report plus the
// run_aggregate block. Throws Error(mismatched_configs) when the reports do
// not share mode, targets, and policy.
AuditReport aggregate_runs(std::span<const AuditReport> reports);

// Exit-code-4 gate: any enabled parity with a significant normalized value.
bool any_significant_normalized(const AuditReport& report);

}  // namespace fairaudit
