#pragma once

#include <string>

#include "fairaudit/audit.hpp"

namespace fairaudit {

// Deterministic report JSON: fixed key order, two-space indent, Undefined
// serialized as null, doubles emitted losslessly.
std::string report_to_json(const AuditReport& report);
AuditReport report_from_json(const std::string& json_text);  // throws Error(malformed_row)

// Flat per-parity CSV for plotting:
//   metric,group_a_value,group_b_value,raw,normalized,significant
// Groupwise grid parities qualify the metric name with "@<ratio>". The
// significant column carries the normalized-parity flag (the exit-code gate).
std::string report_to_flat_csv(const AuditReport& report);

}  // namespace fairaudit
