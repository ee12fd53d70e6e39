#include "fairaudit/types.hpp"

#include <algorithm>
#include <cmath>

namespace fairaudit {

const char* to_string(Gender g) { return g == Gender::Male ? "Male" : "Female"; }

const char* to_string(Grouping g) {
  switch (g) {
    case Grouping::Protection: return "Protection";
    case Grouping::QoS: return "QoS";
    case Grouping::Combined: return "Combined";
    case Grouping::ProtectionAtFixedQoS: return "ProtectionAtFixedQoS";
    case Grouping::Dataset: return "Dataset";
  }
  return "Combined";
}

char gender_code(Gender g) { return g == Gender::Male ? 'M' : 'F'; }

std::optional<Gender> gender_from_code(std::string_view code) {
  if (code == "M" || code == "Male") return Gender::Male;
  if (code == "F" || code == "Female") return Gender::Female;
  return std::nullopt;
}

std::optional<Grouping> grouping_from_string(std::string_view name) {
  if (name == "Protection") return Grouping::Protection;
  if (name == "QoS") return Grouping::QoS;
  if (name == "Combined") return Grouping::Combined;
  if (name == "ProtectionAtFixedQoS") return Grouping::ProtectionAtFixedQoS;
  if (name == "Dataset") return Grouping::Dataset;
  return std::nullopt;
}

ValidationResult validate_records(std::vector<TransactionRecord> records) {
  ValidationResult result;
  if (records.empty()) {
    result.issues.push_back({0, errc::empty_input, "no transaction records"});
    return result;
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!(r.amount >= 0.0) || !std::isfinite(r.amount)) {
      result.issues.push_back({i, errc::negative_amount,
                               "amount must be a finite non-negative number"});
    }
    if (r.label != 0 && r.label != 1) {
      result.issues.push_back({i, errc::malformed_row, "label must be 0 or 1"});
    }
    if (r.card_id.empty()) {
      result.issues.push_back({i, errc::malformed_row, "card_id must be non-empty"});
    }
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const TransactionRecord& a, const TransactionRecord& b) {
                     if (a.card_id != b.card_id) return a.card_id < b.card_id;
                     return a.timestamp < b.timestamp;
                   });
  result.records = std::move(records);
  return result;
}

}  // namespace fairaudit
