#include "fairaudit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fairaudit {

const char* to_string(AuditMode mode) {
  return mode == AuditMode::GlobalThreshold ? "GlobalThreshold" : "GroupwiseThreshold";
}

std::optional<AuditMode> audit_mode_from_string(std::string_view name) {
  if (name == "GlobalThreshold" || name == "global") return AuditMode::GlobalThreshold;
  if (name == "GroupwiseThreshold" || name == "groupwise") return AuditMode::GroupwiseThreshold;
  return std::nullopt;
}

const std::vector<std::string>& global_metric_names() {
  static const std::vector<std::string> names = {
      "tpr_parity",      "vdr_parity", "npv_parity",        "ppv_parity",
      "fpr_parity",      "fp_ratio_parity", "f1_parity",    "equalized_odds",
      "demographic_parity", "roc_auc_parity", "pr_auc_parity"};
  return names;
}

const std::vector<std::string>& groupwise_metric_names() {
  static const std::vector<std::string> names = {"tpr_at_fp_ratio_parity",
                                                 "vdr_at_fp_ratio_parity"};
  return names;
}

void validate(const AuditConfig& config) {
  if (!(config.global_fp_ratio > 0.0)) {
    throw Error(errc::invalid_config, "global_fp_ratio must be > 0");
  }
  if (!(config.policy.bias_threshold > 0.0)) {
    throw Error(errc::invalid_config, "bias_threshold must be > 0");
  }
  std::set<double> seen;
  for (double r : config.fp_ratio_grid) {
    if (!(r > 0.0)) throw Error(errc::invalid_config, "fp_ratio_grid entries must be > 0");
    if (!seen.insert(r).second) {
      throw Error(errc::invalid_config, "fp_ratio_grid entries must be unique");
    }
  }
  const auto& global_names = global_metric_names();
  const auto& groupwise_names = groupwise_metric_names();
  for (const auto& name : config.enabled_metrics) {
    const bool known =
        std::find(global_names.begin(), global_names.end(), name) != global_names.end() ||
        std::find(groupwise_names.begin(), groupwise_names.end(), name) != groupwise_names.end();
    if (!known) throw Error(errc::invalid_config, "unknown metric in enabled_metrics: " + name);
  }
}

namespace {

std::vector<std::string> enabled_for(const AuditConfig& config,
                                     const std::vector<std::string>& mode_names) {
  if (config.enabled_metrics.empty()) return mode_names;
  std::vector<std::string> out;
  for (const auto& name : mode_names) {
    if (std::find(config.enabled_metrics.begin(), config.enabled_metrics.end(), name) !=
        config.enabled_metrics.end()) {
      out.push_back(name);
    }
  }
  return out;
}

}  // namespace

PerGroup<std::vector<ScoredRecord>> split_by_group(std::span<const ScoredRecord> records) {
  PerGroup<std::vector<ScoredRecord>> out;
  for (const auto& r : records) out[r.group].push_back(r);
  return out;
}

DatasetStats compute_dataset_stats(std::span<const ScoredRecord> records,
                                   const BiasPolicy& policy) {
  DatasetStats stats;
  stats.n_records = records.size();
  for (const auto& r : records) {
    auto& g = stats.per_group[r.group];
    ++g.n_records;
    g.n_positives += (r.label == 1);
  }
  for (Gender g : kGroups) {
    auto& s = stats.per_group[g];
    if (s.n_records > 0) {
      s.fraud_rate = static_cast<double>(s.n_positives) / static_cast<double>(s.n_records);
    }
  }
  stats.true_fraud_rate_parity =
      parity("true_fraud_rate_parity", stats.per_group.male.fraud_rate,
             stats.per_group.female.fraud_rate, policy);
  return stats;
}

ParityValue dataset_bias(std::span<const ScoredRecord> records, const BiasPolicy& policy) {
  const auto stats = compute_dataset_stats(records, policy);
  for (Gender g : kGroups) {
    if (stats.per_group[g].n_records == 0) {
      throw Error(errc::empty_group, std::string("group has no records: ") + to_string(g));
    }
  }
  return *stats.true_fraud_rate_parity;
}

AuditReport audit_global(std::span<const ScoredRecord> records, const AuditConfig& config) {
  validate(config);
  AuditReport report;
  report.mode = AuditMode::GlobalThreshold;
  report.policy = config.policy;
  report.fp_ratio_targets = {config.global_fp_ratio};
  report.dataset_stats = compute_dataset_stats(records, config.policy);

  const auto search = threshold_for_fp_ratio(records, config.global_fp_ratio);
  report.global_search = search;
  const double tau = search.threshold;

  const auto groups = split_by_group(records);
  PerGroup<std::optional<double>> group_fp_ratio;
  PerGroup<UtilityMetrics> utilities;
  PerGroup<GroupAuc> aucs;
  for (Gender g : kGroups) {
    const auto counts = confusion_counts(groups[g], tau);
    utilities[g] = utility_metrics(counts);
    group_fp_ratio[g] = fp_ratio(counts);
    aucs[g].roc_auc = roc_auc(groups[g]);
    aucs[g].pr_auc = pr_auc(groups[g]);
  }
  report.per_group_utilities = utilities;
  report.per_group_auc = aucs;
  report.per_group_fp_ratio = group_fp_ratio;

  const auto& m = utilities.male;
  const auto& f = utilities.female;
  for (const auto& name : enabled_for(config, global_metric_names())) {
    if (name == "tpr_parity") {
      report.parities.push_back(parity(name, m.tpr, f.tpr, config.policy));
    } else if (name == "vdr_parity") {
      report.parities.push_back(parity(name, m.vdr, f.vdr, config.policy));
    } else if (name == "npv_parity") {
      report.parities.push_back(parity(name, m.npv, f.npv, config.policy));
    } else if (name == "ppv_parity") {
      report.parities.push_back(parity(name, m.ppv, f.ppv, config.policy));
    } else if (name == "fpr_parity") {
      report.parities.push_back(parity(name, m.fpr, f.fpr, config.policy));
    } else if (name == "fp_ratio_parity") {
      report.parities.push_back(
          parity(name, group_fp_ratio.male, group_fp_ratio.female, config.policy));
    } else if (name == "f1_parity") {
      report.parities.push_back(parity(name, m.f1, f.f1, config.policy));
    } else if (name == "equalized_odds") {
      report.parities.push_back(equalized_odds(m, f, config.policy));
    } else if (name == "demographic_parity") {
      report.parities.push_back(demographic_parity(m, f, config.policy));
    } else if (name == "roc_auc_parity") {
      report.parities.push_back(
          parity(name, aucs.male.roc_auc, aucs.female.roc_auc, config.policy));
    } else if (name == "pr_auc_parity") {
      report.parities.push_back(
          parity(name, aucs.male.pr_auc, aucs.female.pr_auc, config.policy));
    }
  }
  return report;
}

AuditReport audit_groupwise(std::span<const ScoredRecord> records, const AuditConfig& config) {
  validate(config);
  AuditReport report;
  report.mode = AuditMode::GroupwiseThreshold;
  report.policy = config.policy;
  report.fp_ratio_targets = config.fp_ratio_grid;
  report.dataset_stats = compute_dataset_stats(records, config.policy);

  const auto groups = split_by_group(records);
  const auto enabled = enabled_for(config, groupwise_metric_names());

  for (double target : config.fp_ratio_grid) {
    GroupwiseGridPoint point;
    point.fp_ratio_target = target;
    PerGroup<std::optional<double>> tpr_at;
    PerGroup<std::optional<double>> vdr_at;
    for (Gender g : kGroups) {
      bool has_positive = false;
      for (const auto& r : groups[g]) {
        if (r.label == 1) { has_positive = true; break; }
      }
      if (!has_positive) continue;  // search stays nullopt, utilities Undefined
      const auto search = threshold_for_fp_ratio(groups[g], target);
      point.search[g] = search;
      point.utilities[g] = utility_metrics(confusion_counts(groups[g], search.threshold));
      if (search.feasible) {
        tpr_at[g] = point.utilities[g].tpr;
        vdr_at[g] = point.utilities[g].vdr;
      }
    }
    for (const auto& name : enabled) {
      if (name == "tpr_at_fp_ratio_parity") {
        point.parities.push_back(parity(name, tpr_at.male, tpr_at.female, config.policy));
      } else if (name == "vdr_at_fp_ratio_parity") {
        point.parities.push_back(parity(name, vdr_at.male, vdr_at.female, config.policy));
      }
    }
    report.parities.insert(report.parities.end(), point.parities.begin(), point.parities.end());
    report.grid.push_back(std::move(point));
  }
  return report;
}

namespace {

bool same_policy(const BiasPolicy& a, const BiasPolicy& b) {
  return a.bias_threshold == b.bias_threshold && a.normalization == b.normalization;
}

AggregateStat aggregate_values(const std::vector<std::optional<double>>& values) {
  AggregateStat stat;
  double sum = 0.0;
  std::uint32_t n = 0;
  for (const auto& v : values) {
    if (v) { sum += *v; ++n; }
    else ++stat.excluded;
  }
  if (n == 0) return stat;
  const double mean = sum / n;
  stat.mean = mean;
  if (n >= 2) {
    double var = 0.0;
    for (const auto& v : values) {
      if (v) var += (*v - mean) * (*v - mean);
    }
    stat.std_dev = std::sqrt(var / n);
  }
  return stat;
}

}  // namespace

AuditReport aggregate_runs(std::span<const AuditReport> reports) {
  if (reports.empty()) throw Error(errc::empty_input, "no reports to aggregate");
  const AuditReport& first = reports.front();
  for (const auto& r : reports) {
    if (r.mode != first.mode || r.fp_ratio_targets != first.fp_ratio_targets ||
        !same_policy(r.policy, first.policy) || r.parities.size() != first.parities.size()) {
      throw Error(errc::mismatched_configs, "reports disagree on mode, targets, or metrics");
    }
    for (std::size_t i = 0; i < r.parities.size(); ++i) {
      if (r.parities[i].metric_name != first.parities[i].metric_name) {
        throw Error(errc::mismatched_configs, "reports disagree on parity order");
      }
    }
  }

  RunAggregate aggregate;
  aggregate.n_runs = static_cast<std::uint32_t>(reports.size());
  for (std::size_t i = 0; i < first.parities.size(); ++i) {
    RunAggregateEntry entry;
    entry.metric_name = first.parities[i].metric_name;
    if (first.mode == AuditMode::GroupwiseThreshold && !first.grid.empty()) {
      const std::size_t per_point = first.grid.front().parities.size();
      if (per_point > 0) {
        entry.fp_ratio_target = first.grid[i / per_point].fp_ratio_target;
      }
    }
    std::vector<std::optional<double>> raw_values, norm_values;
    for (const auto& r : reports) {
      raw_values.push_back(r.parities[i].raw);
      norm_values.push_back(r.parities[i].normalized);
    }
    entry.raw = aggregate_values(raw_values);
    entry.normalized = aggregate_values(norm_values);
    aggregate.parities.push_back(std::move(entry));
  }

  AuditReport out = first;
  out.run_aggregate = std::move(aggregate);
  return out;
}

bool any_significant_normalized(const AuditReport& report) {
  for (const auto& p : report.parities) {
    if (p.significant_normalized) return true;
  }
  return false;
}

}  // namespace fairaudit
