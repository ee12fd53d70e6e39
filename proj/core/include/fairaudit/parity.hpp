#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "fairaudit/types.hpp"

namespace fairaudit {

struct BiasPolicy {
  enum class Normalization { MaxDenominator };

  double bias_threshold = 0.05;
  Normalization normalization = Normalization::MaxDenominator;
};

// raw = |male - female|; normalized = raw / max(male, female). Normalized is
// Undefined when both values are 0 (nothing to measure) or either input is
// Undefined. Significance flags are strict: value defined and > threshold;
// the boundary value itself is not flagged.
ParityValue parity(const std::string& metric_name, std::optional<double> male,
                   std::optional<double> female, const BiasPolicy& policy);

// raw = |dTPR| + |dFPR|; normalized = mean of the two normalized components,
// keeping the [0,1] range. Undefined if any component is Undefined.
ParityValue equalized_odds(const UtilityMetrics& male, const UtilityMetrics& female,
                           const BiasPolicy& policy);

// Parity over the predicted-positive rates P(Y_hat = 1 | G).
ParityValue demographic_parity(const UtilityMetrics& male, const UtilityMetrics& female,
                               const BiasPolicy& policy);

// Objective cluster for a metric name. Throws Error(unknown_metric).
Grouping metric_grouping(std::string_view metric_name);

}  // namespace fairaudit
