#include "fairaudit/features.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "fairaudit/csv.hpp"

namespace fairaudit {

const char* to_string(InteractionKey key) {
  switch (key) {
    case InteractionKey::Card: return "card";
    case InteractionKey::CardMerchantCode: return "card_mcode";
    case InteractionKey::CardMerchantId: return "card_mid";
  }
  return "card";
}

std::optional<InteractionKey> interaction_key_from_string(std::string_view name) {
  if (name == "card") return InteractionKey::Card;
  if (name == "card_mcode" || name == "card_merchant_code") return InteractionKey::CardMerchantCode;
  if (name == "card_mid" || name == "card_merchant_id") return InteractionKey::CardMerchantId;
  return std::nullopt;
}

void validate(const FeatureConfig& config) {
  std::set<std::int64_t> seen;
  for (auto w : config.windows) {
    if (w <= 0) throw Error(errc::invalid_config, "windows must be positive");
    if (!seen.insert(w).second) throw Error(errc::invalid_config, "duplicate window");
  }
  if (config.target_encoding_smoothing < 0.0) {
    throw Error(errc::invalid_config, "smoothing must be >= 0");
  }
}

TimeParts time_features(std::int64_t timestamp) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{timestamp}};
  const auto day = floor<days>(tp);
  const auto tod = tp - day;
  const year_month_day ymd{day};
  const weekday wd{day};
  TimeParts parts;
  parts.hour = static_cast<int>(duration_cast<hours>(tod).count());
  parts.day_of_week = static_cast<int>(wd.iso_encoding()) - 1;  // ISO: Mon=1..Sun=7
  parts.month = static_cast<int>(unsigned(ymd.month()));
  return parts;
}

RollingAggregates rolling_aggregates(std::span<const std::int64_t> timestamps,
                                     std::span<const double> values,
                                     std::span<const std::uint32_t> keys,
                                     std::span<const std::int64_t> windows) {
  const std::size_t n = timestamps.size();
  if (values.size() != n || keys.size() != n) {
    throw Error(errc::arity_mismatch, "rolling_aggregates input spans differ in length");
  }
  RollingAggregates out;
  out.count.assign(windows.size(), std::vector<double>(n, 0.0));
  out.value_sum.assign(windows.size(), std::vector<double>(n, 0.0));

  // Row indices per key, in input order.
  std::unordered_map<std::uint32_t, std::vector<std::size_t>> by_key;
  for (std::size_t i = 0; i < n; ++i) by_key[keys[i]].push_back(i);

  for (auto& [key, rows] : by_key) {
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (timestamps[rows[k]] < timestamps[rows[k - 1]]) {
        throw Error(errc::unsorted_input, "timestamps decrease within a key");
      }
    }
    // Prefix value sums over the key's rows, held in integer cents so window
    // sums are exact and independent of summation order.
    std::vector<std::int64_t> prefix(rows.size() + 1, 0);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      prefix[k + 1] = prefix[k] + std::llround(values[rows[k]] * 100.0);
    }
    for (std::size_t w = 0; w < windows.size(); ++w) {
      const std::int64_t window = windows[w];
      // Two-pointer sweep: hi = first row with time >= t (excludes the row
      // itself and same-timestamp peers), lo = first row with time > t - w.
      std::size_t lo = 0, hi = 0;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::int64_t t = timestamps[rows[k]];
        while (hi < rows.size() && timestamps[rows[hi]] < t) ++hi;
        while (lo < hi && timestamps[rows[lo]] <= t - window) ++lo;
        out.count[w][rows[k]] = static_cast<double>(hi - lo);
        out.value_sum[w][rows[k]] = static_cast<double>(prefix[hi] - prefix[lo]) / 100.0;
      }
    }
  }
  return out;
}

TargetEncoder TargetEncoder::fit(std::span<const std::string> categories,
                                 std::span<const int> labels, double smoothing) {
  if (categories.empty() || categories.size() != labels.size()) {
    throw Error(errc::empty_training, "target encoder needs non-empty aligned training data");
  }
  TargetEncoder enc;
  std::map<std::string, std::pair<double, double>> tallies;  // category -> (positives, count)
  double positives = 0.0;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    auto& t = tallies[categories[i]];
    t.first += labels[i];
    t.second += 1.0;
    positives += labels[i];
  }
  enc.global_rate_ = positives / static_cast<double>(categories.size());
  for (const auto& [category, t] : tallies) {
    enc.table_[category] =
        (t.first + smoothing * enc.global_rate_) / (t.second + smoothing);
  }
  return enc;
}

double TargetEncoder::apply(const std::string& category) const {
  auto it = table_.find(category);
  return it == table_.end() ? global_rate_ : it->second;
}

StandardScaler StandardScaler::fit(std::span<const std::vector<double>> rows) {
  StandardScaler s;
  if (rows.empty()) return s;
  const std::size_t dim = rows.front().size();
  s.means_.assign(dim, 0.0);
  s.stds_.assign(dim, 0.0);
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < dim; ++j) s.means_[j] += row[j];
  }
  const double n = static_cast<double>(rows.size());
  for (auto& m : s.means_) m /= n;
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = row[j] - s.means_[j];
      s.stds_[j] += d * d;
    }
  }
  for (auto& v : s.stds_) v = std::sqrt(v / n);
  return s;
}

std::vector<double> StandardScaler::apply(const std::vector<double>& row) const {
  if (row.size() != means_.size()) {
    throw Error(errc::arity_mismatch, "scaler arity mismatch");
  }
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    out[j] = stds_[j] == 0.0 ? 0.0 : (row[j] - means_[j]) / stds_[j];
  }
  return out;
}

StandardScaler StandardScaler::from_params(std::vector<double> means, std::vector<double> stds) {
  StandardScaler s;
  s.means_ = std::move(means);
  s.stds_ = std::move(stds);
  return s;
}

std::vector<bool> train_mask_by_time(std::span<const TransactionRecord> records,
                                     double train_fraction) {
  if (!(train_fraction > 0.0) || !(train_fraction <= 1.0)) {
    throw Error(errc::invalid_config, "train_fraction must be in (0, 1]");
  }
  std::vector<bool> mask(records.size(), true);
  if (records.empty() || train_fraction == 1.0) return mask;
  std::vector<std::int64_t> times;
  times.reserve(records.size());
  for (const auto& r : records) times.push_back(r.timestamp);
  std::sort(times.begin(), times.end());
  const auto cut = static_cast<std::size_t>(
      static_cast<double>(times.size()) * train_fraction);
  if (cut >= times.size()) return mask;
  const std::int64_t split_time = times[cut];
  for (std::size_t i = 0; i < records.size(); ++i) {
    mask[i] = records[i].timestamp < split_time;
  }
  return mask;
}

std::string window_label(std::int64_t seconds) {
  if (seconds % 86400 == 0) return std::to_string(seconds / 86400) + "d";
  if (seconds % 3600 == 0) return std::to_string(seconds / 3600) + "h";
  return std::to_string(seconds) + "s";
}

FeatureMatrix build_feature_matrix(std::span<const TransactionRecord> records,
                                   const FeatureConfig& config,
                                   const std::vector<bool>& train_mask) {
  validate(config);
  if (train_mask.size() != records.size()) {
    throw Error(errc::arity_mismatch, "train mask length mismatch");
  }
  const std::size_t n = records.size();

  FeatureMatrix matrix;
  matrix.feature_names.push_back("amount");
  if (config.include_gender) matrix.feature_names.push_back("gender");
  matrix.feature_names.push_back("merchant_code_te");
  matrix.feature_names.push_back("merchant_id_te");
  matrix.feature_names.push_back("hour");
  matrix.feature_names.push_back("day_of_week");
  matrix.feature_names.push_back("month");
  for (auto key : config.interaction_keys) {
    for (auto w : config.windows) {
      const std::string base = std::string(to_string(key)) + "_" + window_label(w);
      matrix.feature_names.push_back(base + "_count");
      matrix.feature_names.push_back(base + "_value_sum");
    }
  }

  // Encoders fit on training rows only.
  std::vector<std::string> train_codes, train_mids;
  std::vector<int> train_labels;
  for (std::size_t i = 0; i < n; ++i) {
    if (!train_mask[i]) continue;
    train_codes.push_back(records[i].merchant_code);
    train_mids.push_back(records[i].merchant_id);
    train_labels.push_back(records[i].label);
  }
  const auto code_encoder =
      TargetEncoder::fit(train_codes, train_labels, config.target_encoding_smoothing);
  const auto mid_encoder =
      TargetEncoder::fit(train_mids, train_labels, config.target_encoding_smoothing);

  // Dense key ids per interaction key.
  std::vector<std::int64_t> times(n);
  std::vector<double> amounts(n);
  for (std::size_t i = 0; i < n; ++i) {
    times[i] = records[i].timestamp;
    amounts[i] = records[i].amount;
  }
  // Rolling aggregation walks rows in global time order so the per-key
  // two-pointer sweep sees sorted timestamps even though the input is sorted
  // by (card_id, timestamp).
  std::vector<std::size_t> time_order(n);
  for (std::size_t i = 0; i < n; ++i) time_order[i] = i;
  std::stable_sort(time_order.begin(), time_order.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  std::vector<std::int64_t> sorted_times(n);
  std::vector<double> sorted_amounts(n);
  for (std::size_t k = 0; k < n; ++k) {
    sorted_times[k] = times[time_order[k]];
    sorted_amounts[k] = amounts[time_order[k]];
  }

  auto key_string = [&](InteractionKey key, const TransactionRecord& r) -> std::string {
    switch (key) {
      case InteractionKey::Card: return r.card_id;
      case InteractionKey::CardMerchantCode: return r.card_id + "\x1f" + r.merchant_code;
      case InteractionKey::CardMerchantId: return r.card_id + "\x1f" + r.merchant_id;
    }
    return r.card_id;
  };

  std::vector<RollingAggregates> per_key_aggs;
  per_key_aggs.reserve(config.interaction_keys.size());
  for (auto key : config.interaction_keys) {
    std::unordered_map<std::string, std::uint32_t> ids;
    std::vector<std::uint32_t> dense(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& r = records[time_order[k]];
      auto [it, _] = ids.try_emplace(key_string(key, r),
                                     static_cast<std::uint32_t>(ids.size()));
      dense[k] = it->second;
    }
    auto aggs = rolling_aggregates(sorted_times, sorted_amounts, dense, config.windows);
    // Scatter back to input order.
    RollingAggregates in_order;
    in_order.count.assign(config.windows.size(), std::vector<double>(n, 0.0));
    in_order.value_sum.assign(config.windows.size(), std::vector<double>(n, 0.0));
    for (std::size_t w = 0; w < config.windows.size(); ++w) {
      for (std::size_t k = 0; k < n; ++k) {
        in_order.count[w][time_order[k]] = aggs.count[w][k];
        in_order.value_sum[w][time_order[k]] = aggs.value_sum[w][k];
      }
    }
    per_key_aggs.push_back(std::move(in_order));
  }

  matrix.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records[i];
    FeatureRow row;
    row.label = r.label;
    row.group = r.gender;
    row.value = r.amount;
    row.card_id = r.card_id;
    row.timestamp = r.timestamp;
    row.is_train = train_mask[i];
    row.values.reserve(matrix.feature_names.size());
    row.values.push_back(r.amount);
    if (config.include_gender) {
      row.values.push_back(r.gender == Gender::Male ? 0.0 : 1.0);  // Male: 0, Female: 1
    }
    row.values.push_back(code_encoder.apply(r.merchant_code));
    row.values.push_back(mid_encoder.apply(r.merchant_id));
    const auto parts = time_features(r.timestamp);
    row.values.push_back(static_cast<double>(parts.hour));
    row.values.push_back(static_cast<double>(parts.day_of_week));
    row.values.push_back(static_cast<double>(parts.month));
    for (std::size_t k = 0; k < config.interaction_keys.size(); ++k) {
      for (std::size_t w = 0; w < config.windows.size(); ++w) {
        row.values.push_back(per_key_aggs[k].count[w][i]);
        row.values.push_back(per_key_aggs[k].value_sum[w][i]);
      }
    }
    matrix.rows.push_back(std::move(row));
  }
  return matrix;
}

namespace {

constexpr const char* kMetaHeader = "card_id,timestamp,label,group,value,partition";

}  // namespace

void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix) {
  out << kMetaHeader;
  for (const auto& name : matrix.feature_names) out << ',' << name;
  out << '\n';
  for (const auto& row : matrix.rows) {
    out << csv_escape(row.card_id) << ',' << row.timestamp << ',' << row.label << ','
        << gender_code(row.group) << ',' << format_double(row.value) << ','
        << (row.is_train ? "train" : "test");
    for (double v : row.values) out << ',' << format_double(v);
    out << '\n';
  }
}

FeatureMatrix read_feature_csv(std::istream& in) {
  FeatureMatrix matrix;
  std::string line;
  if (!std::getline(in, line)) throw Error(errc::empty_input, "empty feature CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  const auto meta = split_csv_line(kMetaHeader);
  if (header.size() < meta.size()) {
    throw Error(errc::malformed_row, "feature CSV header too short");
  }
  for (std::size_t i = 0; i < meta.size(); ++i) {
    if (header[i] != meta[i]) {
      throw Error(errc::malformed_row, "feature CSV meta columns must start with '" +
                                           std::string(kMetaHeader) + "'");
    }
  }
  matrix.feature_names.assign(header.begin() + static_cast<std::ptrdiff_t>(meta.size()),
                              header.end());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != meta.size() + matrix.feature_names.size()) {
      throw Error(errc::malformed_row,
                  "feature CSV row " + std::to_string(lineno) + " has wrong arity");
    }
    FeatureRow row;
    row.card_id = fields[0];
    row.timestamp = std::stoll(fields[1]);
    row.label = fields[2] == "1" ? 1 : 0;
    auto g = gender_from_code(fields[3]);
    if (!g) throw Error(errc::malformed_row, "bad group on row " + std::to_string(lineno));
    row.group = *g;
    row.value = std::stod(fields[4]);
    row.is_train = fields[5] == "train";
    row.values.reserve(matrix.feature_names.size());
    for (std::size_t j = meta.size(); j < fields.size(); ++j) {
      row.values.push_back(std::stod(fields[j]));
    }
    matrix.rows.push_back(std::move(row));
  }
  return matrix;
}

std::int64_t parse_window(std::string_view text) {
  if (text.empty()) throw Error(errc::invalid_config, "empty window");
  std::int64_t scale = 1;
  switch (text.back()) {
    case 'd': scale = 86400; text.remove_suffix(1); break;
    case 'h': scale = 3600; text.remove_suffix(1); break;
    case 'm': scale = 60; text.remove_suffix(1); break;
    case 's': scale = 1; text.remove_suffix(1); break;
    default: break;
  }
  std::int64_t n = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc() || ptr != text.data() + text.size() || n <= 0) {
    throw Error(errc::invalid_config, "bad window specification");
  }
  return n * scale;
}

std::string feature_config_to_json(const FeatureConfig& config) {
  nlohmann::ordered_json j;
  std::vector<std::string> windows;
  for (auto w : config.windows) windows.push_back(window_label(w));
  j["windows"] = windows;
  j["include_gender"] = config.include_gender;
  std::vector<std::string> keys;
  for (auto k : config.interaction_keys) keys.emplace_back(to_string(k));
  j["interaction_keys"] = keys;
  j["target_encoding_smoothing"] = config.target_encoding_smoothing;
  return j.dump(2) + "\n";
}

FeatureConfig feature_config_from_json(const std::string& json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    FeatureConfig c;
    if (j.contains("windows")) {
      c.windows.clear();
      for (const auto& w : j.at("windows")) {
        if (w.is_string()) c.windows.push_back(parse_window(w.get<std::string>()));
        else c.windows.push_back(w.get<std::int64_t>());
      }
    }
    if (j.contains("include_gender")) c.include_gender = j.at("include_gender").get<bool>();
    if (j.contains("interaction_keys")) {
      c.interaction_keys.clear();
      for (const auto& k : j.at("interaction_keys")) {
        auto key = interaction_key_from_string(k.get<std::string>());
        if (!key) throw Error(errc::invalid_config, "bad interaction key");
        c.interaction_keys.push_back(*key);
      }
    }
    if (j.contains("target_encoding_smoothing")) {
      c.target_encoding_smoothing = j.at("target_encoding_smoothing").get<double>();
    }
    validate(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::malformed_row, std::string("bad feature config JSON: ") + e.what());
  }
}

void write_feature_csv_file(const std::string& path, const FeatureMatrix& matrix) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io_failure, "cannot write: " + path);
  write_feature_csv(out, matrix);
  if (!out) throw Error(errc::io_failure, "write failed: " + path);
}

FeatureMatrix read_feature_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_failure, "cannot open: " + path);
  return read_feature_csv(in);
}

}  // namespace fairaudit
