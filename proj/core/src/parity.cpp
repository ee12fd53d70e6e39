#include "fairaudit/parity.hpp"

#include <cmath>

namespace fairaudit {

namespace {

struct Component {
  std::optional<double> raw;
  std::optional<double> normalized;
};

Component component(std::optional<double> male, std::optional<double> female) {
  Component c;
  if (!male || !female) return c;
  c.raw = std::fabs(*male - *female);
  const double denom = std::max(*male, *female);
  if (denom > 0.0) c.normalized = *c.raw / denom;
  return c;
}

bool significant(std::optional<double> value, const BiasPolicy& policy) {
  return value.has_value() && *value > policy.bias_threshold;
}

ParityValue assemble(const std::string& metric_name, std::optional<double> male,
                     std::optional<double> female, std::optional<double> raw,
                     std::optional<double> normalized, const BiasPolicy& policy) {
  ParityValue p;
  p.metric_name = metric_name;
  p.raw = raw;
  p.normalized = normalized;
  p.group_values = {{to_string(Gender::Male), male}, {to_string(Gender::Female), female}};
  p.grouping = metric_grouping(metric_name);
  p.significant_raw = significant(raw, policy);
  p.significant_normalized = significant(normalized, policy);
  return p;
}

}  // namespace

ParityValue parity(const std::string& metric_name, std::optional<double> male,
                   std::optional<double> female, const BiasPolicy& policy) {
  const auto c = component(male, female);
  return assemble(metric_name, male, female, c.raw, c.normalized, policy);
}

ParityValue equalized_odds(const UtilityMetrics& male, const UtilityMetrics& female,
                           const BiasPolicy& policy) {
  const auto tpr = component(male.tpr, female.tpr);
  const auto fpr = component(male.fpr, female.fpr);
  std::optional<double> raw;
  std::optional<double> normalized;
  if (tpr.raw && fpr.raw) raw = *tpr.raw + *fpr.raw;
  if (tpr.normalized && fpr.normalized) normalized = 0.5 * (*tpr.normalized + *fpr.normalized);

  ParityValue p;
  p.metric_name = "equalized_odds";
  p.raw = raw;
  p.normalized = normalized;
  // The two-component metric reports its underlying values per component.
  p.group_values = {{"Male.tpr", male.tpr},
                    {"Female.tpr", female.tpr},
                    {"Male.fpr", male.fpr},
                    {"Female.fpr", female.fpr}};
  p.grouping = metric_grouping(p.metric_name);
  p.significant_raw = raw.has_value() && *raw > policy.bias_threshold;
  p.significant_normalized = normalized.has_value() && *normalized > policy.bias_threshold;
  return p;
}

ParityValue demographic_parity(const UtilityMetrics& male, const UtilityMetrics& female,
                               const BiasPolicy& policy) {
  return parity("demographic_parity", male.predicted_positive_rate,
                female.predicted_positive_rate, policy);
}

Grouping metric_grouping(std::string_view metric_name) {
  if (metric_name == "tpr_parity" || metric_name == "vdr_parity" ||
      metric_name == "npv_parity") {
    return Grouping::Protection;
  }
  if (metric_name == "ppv_parity" || metric_name == "fpr_parity" ||
      metric_name == "fp_ratio_parity") {
    return Grouping::QoS;
  }
  if (metric_name == "f1_parity" || metric_name == "equalized_odds" ||
      metric_name == "demographic_parity" || metric_name == "roc_auc_parity" ||
      metric_name == "pr_auc_parity") {
    return Grouping::Combined;
  }
  if (metric_name == "tpr_at_fp_ratio_parity" || metric_name == "vdr_at_fp_ratio_parity") {
    return Grouping::ProtectionAtFixedQoS;
  }
  if (metric_name == "true_fraud_rate_parity") {
    return Grouping::Dataset;
  }
  throw Error(errc::unknown_metric, "unknown metric name: " + std::string(metric_name));
}

}  // namespace fairaudit
