#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairaudit {

// Binary sensitive attribute. Formulas in the parity layer are written for
// exactly two groups; the report schema carries group names as strings so a
// multi-group extension does not break the wire format.
enum class Gender { Male, Female };

enum class Grouping { Protection, QoS, Combined, ProtectionAtFixedQoS, Dataset };

enum class errc {
  malformed_row,
  negative_amount,
  empty_input,
  no_positives,
  unknown_metric,
  empty_group,
  mismatched_configs,
  unsorted_input,
  empty_training,
  target_unreachable,
  single_class,
  non_finite_loss,
  arity_mismatch,
  invalid_config,
  io_failure,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

struct TransactionRecord {
  std::int64_t timestamp = 0;  // seconds since epoch, UTC
  std::string card_id;
  std::string merchant_id;
  std::string merchant_code;
  double amount = 0.0;  // gross transaction value, >= 0
  Gender gender = Gender::Male;
  int label = 0;  // 0 = genuine, 1 = fraud
};

struct ScoredRecord {
  double score = 0.0;  // fraud probability in [0,1]
  int label = 0;
  Gender group = Gender::Male;
  double value = 0.0;
  std::string card_id;
};

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;
  double tp_value = 0.0;  // summed value of true positives (for VDR)
  double fn_value = 0.0;  // summed value of false negatives

  std::uint64_t total() const { return tp + fp + tn + fn; }
};

// Every field is nullopt when its defining denominator is zero. A zero
// denominator is reported as Undefined, never coerced to 0 or 1.
struct UtilityMetrics {
  std::optional<double> tpr;
  std::optional<double> fpr;
  std::optional<double> ppv;
  std::optional<double> npv;
  std::optional<double> f1;
  std::optional<double> predicted_positive_rate;
  std::optional<double> vdr;
};

struct GroupValue {
  std::string group;
  std::optional<double> value;
};

struct ParityValue {
  std::string metric_name;
  std::optional<double> raw;         // |male - female|, nullopt if an input is Undefined
  std::optional<double> normalized;  // raw / max(male, female), nullopt on 0/0
  std::vector<GroupValue> group_values;
  Grouping grouping = Grouping::Combined;
  bool significant_raw = false;
  bool significant_normalized = false;
};

// Fixed two-slot container indexed by Gender.
template <class T>
struct PerGroup {
  T male{};
  T female{};

  T& operator[](Gender g) { return g == Gender::Male ? male : female; }
  const T& operator[](Gender g) const { return g == Gender::Male ? male : female; }
};

inline constexpr Gender kGroups[2] = {Gender::Male, Gender::Female};

const char* to_string(Gender g);
const char* to_string(Grouping g);
char gender_code(Gender g);  // 'M' / 'F'
std::optional<Gender> gender_from_code(std::string_view code);
std::optional<Grouping> grouping_from_string(std::string_view name);

struct RowIssue {
  std::size_t row = 0;  // index as documented by the producing routine
  errc code = errc::malformed_row;
  std::string message;
};

struct ValidationResult {
  std::vector<TransactionRecord> records;  // sorted by (card_id, timestamp)
  std::vector<RowIssue> issues;

  bool ok() const { return issues.empty(); }
};

// Sorts by (card_id, timestamp) and checks record invariants. Issues carry the
// 0-based index of the offending record in the input sequence. An empty input
// yields a single empty_input issue.
ValidationResult validate_records(std::vector<TransactionRecord> records);

}  // namespace fairaudit
