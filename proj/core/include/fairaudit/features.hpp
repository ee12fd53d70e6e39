#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fairaudit/types.hpp"

namespace fairaudit {

enum class InteractionKey { Card, CardMerchantCode, CardMerchantId };

const char* to_string(InteractionKey key);
std::optional<InteractionKey> interaction_key_from_string(std::string_view name);

struct FeatureConfig {
  std::vector<std::int64_t> windows = {86400, 7 * 86400, 30 * 86400};  // seconds
  bool include_gender = true;  // false = fairness through unawareness
  std::vector<InteractionKey> interaction_keys = {
      InteractionKey::Card, InteractionKey::CardMerchantCode, InteractionKey::CardMerchantId};
  double target_encoding_smoothing = 20.0;
};

// Throws Error(invalid_config) on non-positive or duplicate windows.
void validate(const FeatureConfig& config);

struct TimeParts {
  int hour;         // [0,23]
  int day_of_week;  // [0,6], Monday = 0
  int month;        // [1,12]
};

// Proleptic Gregorian, UTC.
TimeParts time_features(std::int64_t timestamp);

// Backward-looking aggregates per row and window: transactions sharing the
// row's key with time strictly inside (t - window, t). The row itself and any
// same-timestamp transaction are outside the window.
//
// timestamps must be non-decreasing within each key (Error(unsorted_input)).
// Result is indexed [window][row]; counts and value sums separately. Value
// sums accumulate at cent resolution (integer cents internally), so any
// recomputation of a window reproduces them exactly.
struct RollingAggregates {
  std::vector<std::vector<double>> count;      // [window][row]
  std::vector<std::vector<double>> value_sum;  // [window][row]
};
RollingAggregates rolling_aggregates(std::span<const std::int64_t> timestamps,
                                     std::span<const double> values,
                                     std::span<const std::uint32_t> keys,
                                     std::span<const std::int64_t> windows);

// Smoothed category -> positive-rate encoder, fit on training rows only.
// encoding = (positives + smoothing * global_rate) / (count + smoothing);
// unseen categories map to the global rate.
class TargetEncoder {
 public:
  static TargetEncoder fit(std::span<const std::string> categories, std::span<const int> labels,
                           double smoothing);  // Error(empty_training) on empty input
  double apply(const std::string& category) const;
  double global_rate() const { return global_rate_; }

 private:
  std::map<std::string, double> table_;
  double global_rate_ = 0.0;
};

// Column-wise (x - mean) / std with population std; a zero-variance column
// maps to 0.
class StandardScaler {
 public:
  static StandardScaler fit(std::span<const std::vector<double>> rows);
  std::vector<double> apply(const std::vector<double>& row) const;

  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& stds() const { return stds_; }
  static StandardScaler from_params(std::vector<double> means, std::vector<double> stds);

 private:
  std::vector<double> means_;
  std::vector<double> stds_;
};

struct FeatureRow {
  std::vector<double> values;
  int label = 0;
  Gender group = Gender::Male;
  double value = 0.0;  // transaction amount, passed through for audits
  std::string card_id;
  std::int64_t timestamp = 0;
  bool is_train = false;
};

struct FeatureMatrix {
  std::vector<std::string> feature_names;
  std::vector<FeatureRow> rows;
};

// Train mask = rows whose timestamp falls in the first `train_fraction` of
// the time-sorted range (temporal split, no cardholder filtering).
std::vector<bool> train_mask_by_time(std::span<const TransactionRecord> records,
                                     double train_fraction);

// Raw columns (amount, gender iff enabled, target-encoded merchant code/id),
// time-of-day columns, and rolling aggregates per configured interaction key
// and window. Encoders are fit on the train-mask rows only; every rolling
// statistic uses strictly earlier transactions.
// records must be sorted by (card_id, timestamp).
FeatureMatrix build_feature_matrix(std::span<const TransactionRecord> records,
                                   const FeatureConfig& config,
                                   const std::vector<bool>& train_mask);

void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix);
FeatureMatrix read_feature_csv(std::istream& in);  // throws Error(malformed_row)
void write_feature_csv_file(const std::string& path, const FeatureMatrix& matrix);
FeatureMatrix read_feature_csv_file(const std::string& path);

std::string window_label(std::int64_t seconds);  // 86400 -> "1d", 3600 -> "1h", 90 -> "90s"
std::int64_t parse_window(std::string_view text);  // "7d" / "12h" / "90s" / plain seconds

std::string feature_config_to_json(const FeatureConfig& config);
FeatureConfig feature_config_from_json(const std::string& json_text);

}  // namespace fairaudit
