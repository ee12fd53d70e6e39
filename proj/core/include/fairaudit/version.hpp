#pragma once

namespace fairaudit {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "fairaudit.audit_report.v1";

}  // namespace fairaudit
