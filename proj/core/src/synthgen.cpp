#include "fairaudit/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "fairaudit/rng.hpp"
#include "fairaudit/version.hpp"

namespace fairaudit {

namespace {

// 2024-01-01 00:00:00 UTC (a Monday); four months of data spans Jan-Apr so
// hour, weekday, and month features all vary.
constexpr std::int64_t kBaseEpoch = 1704067200;

// Hourly and weekday activity multipliers. The candidate rate is scaled by
// max/mean so accept-reject thinning preserves the configured mean rate.
double hour_weight(int hour) {
  if (hour < 6) return 0.4;
  if (hour < 9) return 0.8;
  if (hour < 18) return 1.2;
  return 0.8;
}

double weekday_weight(int day_of_week) {  // Monday = 0
  return day_of_week < 5 ? 1.05 : 0.875;
}

constexpr double kMeanHourWeight = (6 * 0.4 + 3 * 0.8 + 9 * 1.2 + 6 * 0.8) / 24.0;  // 0.85
constexpr double kMeanWeekdayWeight = (5 * 1.05 + 2 * 0.875) / 7.0;                 // 1.0
constexpr double kMaxWeight = 1.2 * 1.05;

// Per-code fraud-odds multiplier. Codes preferred under the Male profile
// carry a spread of risk levels (mean 1), giving a code -> risk signal the
// scorer can learn; Female-profile codes are flat. With proxy_strength 0 the
// two halves are visited equally by everyone, so the asymmetry cancels.
double code_risk(std::uint32_t code, std::uint32_t n_codes) {
  static constexpr std::array<double, 5> pattern = {0.4, 0.6, 1.0, 1.4, 1.6};
  if (code < n_codes / 2) return pattern[code % pattern.size()];
  return 1.0;
}

std::string card_name(std::uint32_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "c%06u", i);
  return buf;
}

std::string merchant_name(std::uint32_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "m%05u", i);
  return buf;
}

std::string code_name(std::uint32_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "mc%03u", i);
  return buf;
}

}  // namespace

void validate(const GeneratorConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(errc::invalid_config, msg); };
  if (c.n_cards == 0) fail("n_cards must be positive");
  if (!(c.gender_split > 0.0 && c.gender_split < 1.0)) fail("gender_split must be in (0,1)");
  if (c.duration_days == 0) fail("duration_days must be positive");
  if (!(c.txn_rate > 0.0)) fail("txn_rate must be positive");
  if (c.n_merchants == 0) fail("n_merchants must be positive");
  if (c.n_merchant_codes < 2) fail("n_merchant_codes must be at least 2");
  if (!(c.base_fraud_rate > 0.0 && c.base_fraud_rate < 1.0)) {
    fail("base_fraud_rate must be in (0,1)");
  }
  if (!(c.fraud_rate_gender_gap > 0.0)) fail("fraud_rate_gender_gap must be positive");
  if (!(c.proxy_strength >= 0.0 && c.proxy_strength <= 1.0)) {
    fail("proxy_strength must be in [0,1]");
  }
  if (!(c.genuine_value.sigma >= 0.0) || !(c.fraud_value.sigma >= 0.0)) {
    fail("value sigma must be non-negative");
  }
}

std::vector<TransactionRecord> generate(const GeneratorConfig& config) {
  validate(config);
  std::vector<TransactionRecord> records;
  records.reserve(static_cast<std::size_t>(
      static_cast<double>(config.n_cards) * config.duration_days * config.txn_rate * 1.2));

  const double horizon = static_cast<double>(config.duration_days) * 86400.0;
  const double rate_per_sec = config.txn_rate / 86400.0;
  const double candidate_rate =
      rate_per_sec * kMaxWeight / (kMeanHourWeight * kMeanWeekdayWeight);
  const double base_odds = config.base_fraud_rate / (1.0 - config.base_fraud_rate);
  const std::uint32_t half = config.n_merchant_codes / 2;

  for (std::uint32_t card = 0; card < config.n_cards; ++card) {
    Rng rng(derive_seed(config.seed, card));
    const Gender gender = rng.uniform() < config.gender_split ? Gender::Male : Gender::Female;
    const std::string card_id = card_name(card);

    // Personal preference: a handful of favourite codes with random weights.
    constexpr std::size_t kPrefs = 4;
    std::array<std::uint32_t, kPrefs> pref_codes;
    std::array<double, kPrefs> pref_cdf;
    double weight_sum = 0.0;
    for (std::size_t k = 0; k < kPrefs; ++k) {
      pref_codes[k] = static_cast<std::uint32_t>(rng.below(config.n_merchant_codes));
      pref_cdf[k] = 0.2 + rng.uniform();
      weight_sum += pref_cdf[k];
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < kPrefs; ++k) {
      acc += pref_cdf[k] / weight_sum;
      pref_cdf[k] = acc;
    }

    double t = rng.exponential(candidate_rate);
    while (t < horizon) {
      const std::int64_t timestamp = kBaseEpoch + static_cast<std::int64_t>(t);
      const std::int64_t day_index = static_cast<std::int64_t>(t) / 86400;
      const int hour = static_cast<int>((static_cast<std::int64_t>(t) / 3600) % 24);
      const int dow = static_cast<int>(day_index % 7);  // base epoch is a Monday
      const double w = hour_weight(hour) * weekday_weight(dow);
      if (rng.uniform() < w / kMaxWeight) {
        std::uint32_t code;
        if (rng.bernoulli(config.proxy_strength)) {
          // Gender-tied profile: Male prefers the first half of the code
          // space, Female the second.
          code = gender == Gender::Male
                     ? static_cast<std::uint32_t>(rng.below(half))
                     : half + static_cast<std::uint32_t>(
                                  rng.below(config.n_merchant_codes - half));
        } else {
          const double u = rng.uniform();
          std::size_t k = 0;
          while (k + 1 < kPrefs && u > pref_cdf[k]) ++k;
          code = pref_codes[k];
        }
        const double odds = base_odds *
                            (gender == Gender::Male ? config.fraud_rate_gender_gap : 1.0) *
                            code_risk(code, config.n_merchant_codes);
        const double p_fraud = odds / (1.0 + odds);
        const int label = rng.bernoulli(p_fraud) ? 1 : 0;
        const auto& vp = label == 1 ? config.fraud_value : config.genuine_value;
        const double amount = std::round(rng.log_normal(vp.mu, vp.sigma) * 100.0) / 100.0;

        TransactionRecord r;
        r.timestamp = timestamp;
        r.card_id = card_id;
        r.merchant_id = merchant_name(static_cast<std::uint32_t>(rng.below(config.n_merchants)));
        r.merchant_code = code_name(code);
        r.amount = amount;
        r.gender = gender;
        r.label = label;
        records.push_back(std::move(r));
      }
      t += rng.exponential(candidate_rate);
    }
  }

  std::stable_sort(records.begin(), records.end(),
                   [](const TransactionRecord& a, const TransactionRecord& b) {
                     if (a.card_id != b.card_id) return a.card_id < b.card_id;
                     return a.timestamp < b.timestamp;
                   });
  return records;
}

DatasetSummary summarize(std::span<const TransactionRecord> records) {
  DatasetSummary s;
  std::unordered_map<std::string, std::pair<Gender, bool>> cards;  // id -> (gender, defrauded)
  PerGroup<std::uint64_t> txns{};
  PerGroup<std::uint64_t> frauds{};
  for (const auto& r : records) {
    auto [it, inserted] = cards.try_emplace(r.card_id, std::make_pair(r.gender, false));
    if (r.label == 1) it->second.second = true;
    ++txns[r.gender];
    frauds[r.gender] += (r.label == 1);
  }
  for (const auto& [id, info] : cards) {
    ++s.cards.total;
    (info.first == Gender::Male ? s.cards.male : s.cards.female)++;
    if (info.second) {
      ++s.defrauded_cards.total;
      (info.first == Gender::Male ? s.defrauded_cards.male : s.defrauded_cards.female)++;
    }
  }
  s.transactions = {txns.male + txns.female, txns.male, txns.female};
  const std::uint64_t fraud_total = frauds.male + frauds.female;
  auto rate = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  s.fraud_rate.total = rate(fraud_total, s.transactions.total);
  s.fraud_rate.male = rate(frauds.male, txns.male);
  s.fraud_rate.female = rate(frauds.female, txns.female);
  return s;
}

namespace {

using Json = nlohmann::ordered_json;

Json counts_json(const GenderedCount& c) {
  return Json{{"total", c.total}, {"Male", c.male}, {"Female", c.female}};
}

Json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

std::string summary_to_json(const DatasetSummary& s) {
  Json j;
  j["schema"] = "fairaudit.dataset_summary.v1";
  j["tool_version"] = kToolVersion;
  j["cards"] = counts_json(s.cards);
  j["defrauded_cards"] = counts_json(s.defrauded_cards);
  j["transactions"] = counts_json(s.transactions);
  j["fraud_rate"] = {{"total", opt_json(s.fraud_rate.total)},
                     {"Male", opt_json(s.fraud_rate.male)},
                     {"Female", opt_json(s.fraud_rate.female)}};
  j["units"] = {{"fraud_rate", "fraction"}};
  return j.dump(2) + "\n";
}

std::string generator_config_to_json(const GeneratorConfig& c) {
  Json j;
  j["n_cards"] = c.n_cards;
  j["gender_split"] = c.gender_split;
  j["duration_days"] = c.duration_days;
  j["txn_rate"] = c.txn_rate;
  j["n_merchants"] = c.n_merchants;
  j["n_merchant_codes"] = c.n_merchant_codes;
  j["base_fraud_rate"] = c.base_fraud_rate;
  j["fraud_rate_gender_gap"] = c.fraud_rate_gender_gap;
  j["proxy_strength"] = c.proxy_strength;
  j["genuine_value"] = {{"mu", c.genuine_value.mu}, {"sigma", c.genuine_value.sigma}};
  j["fraud_value"] = {{"mu", c.fraud_value.mu}, {"sigma", c.fraud_value.sigma}};
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

GeneratorConfig generator_config_from_json(const std::string& json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    GeneratorConfig c;
    if (j.contains("n_cards")) c.n_cards = j.at("n_cards").get<std::uint32_t>();
    if (j.contains("gender_split")) c.gender_split = j.at("gender_split").get<double>();
    if (j.contains("duration_days")) c.duration_days = j.at("duration_days").get<std::uint32_t>();
    if (j.contains("txn_rate")) c.txn_rate = j.at("txn_rate").get<double>();
    if (j.contains("n_merchants")) c.n_merchants = j.at("n_merchants").get<std::uint32_t>();
    if (j.contains("n_merchant_codes")) {
      c.n_merchant_codes = j.at("n_merchant_codes").get<std::uint32_t>();
    }
    if (j.contains("base_fraud_rate")) c.base_fraud_rate = j.at("base_fraud_rate").get<double>();
    if (j.contains("fraud_rate_gender_gap")) {
      c.fraud_rate_gender_gap = j.at("fraud_rate_gender_gap").get<double>();
    }
    if (j.contains("proxy_strength")) c.proxy_strength = j.at("proxy_strength").get<double>();
    if (j.contains("genuine_value")) {
      c.genuine_value = {j.at("genuine_value").at("mu").get<double>(),
                         j.at("genuine_value").at("sigma").get<double>()};
    }
    if (j.contains("fraud_value")) {
      c.fraud_value = {j.at("fraud_value").at("mu").get<double>(),
                       j.at("fraud_value").at("sigma").get<double>()};
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::malformed_row, std::string("bad generator config JSON: ") + e.what());
  }
}

}  // namespace fairaudit
