#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairaudit/types.hpp"

namespace fairaudit {

struct LogNormalParams {
  double mu = 0.0;
  double sigma = 1.0;
};

struct GeneratorConfig {
  std::uint32_t n_cards = 1000;
  double gender_split = 0.5;  // fraction male
  std::uint32_t duration_days = 120;
  double txn_rate = 0.85;  // mean transactions per card per day
  std::uint32_t n_merchants = 800;
  std::uint32_t n_merchant_codes = 20;
  double base_fraud_rate = 0.005;       // per-transaction fraud probability anchor
  double fraud_rate_gender_gap = 1.0;   // multiplicative odds factor for Male
  double proxy_strength = 0.0;          // 0 = no gender signal in merchant codes
  LogNormalParams genuine_value{3.3, 0.9};
  LogNormalParams fraud_value{5.8, 0.8};
  std::uint64_t seed = 1;
};

// Throws Error(invalid_config) with a field-specific message.
void validate(const GeneratorConfig& config);

// Deterministic world draw: per card, gender by split, a personal merchant
// code preference mixed with a gender-tied preference by proxy_strength,
// arrivals from a seasonal rate process, log-normal amounts, and fraud odds
// scaled by the gender gap and a per-code risk multiplier. Output sorted by
// (card_id, timestamp). All rates are fractions, not percentages.
std::vector<TransactionRecord> generate(const GeneratorConfig& config);

struct GenderedCount {
  std::uint64_t total = 0;
  std::uint64_t male = 0;
  std::uint64_t female = 0;
};

struct GenderedRate {
  std::optional<double> total;
  std::optional<double> male;
  std::optional<double> female;
};

struct DatasetSummary {
  GenderedCount cards;
  GenderedCount defrauded_cards;  // cards with at least one fraud transaction
  GenderedCount transactions;
  GenderedRate fraud_rate;  // fraction of transactions labelled fraud
};

DatasetSummary summarize(std::span<const TransactionRecord> records);

std::string summary_to_json(const DatasetSummary& summary);
std::string generator_config_to_json(const GeneratorConfig& config);
GeneratorConfig generator_config_from_json(const std::string& json_text);

}  // namespace fairaudit
