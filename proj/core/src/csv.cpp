#include "fairaudit/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fairaudit {

namespace {

constexpr const char* kTxnHeader = "timestamp,card_id,merchant_id,merchant_code,amount,gender,label";
constexpr const char* kScoredHeader = "score,label,group,value,card_id";

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_i64(const std::string& s, std::int64_t& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_label(const std::string& s, int& out) {
  if (s == "0") { out = 0; return true; }
  if (s == "1") { out = 1; return true; }
  return false;
}

// Strips a trailing \r so CRLF files parse cleanly.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

ParseResult<TransactionRecord> read_transactions_csv(std::istream& in) {
  ParseResult<TransactionRecord> result;
  std::string line;
  if (!next_line(in, line)) {
    result.issues.push_back({1, errc::empty_input, "empty file"});
    return result;
  }
  if (line != kTxnHeader) {
    result.issues.push_back({1, errc::malformed_row,
                             std::string("expected header '") + kTxnHeader + "'"});
    return result;
  }
  std::size_t lineno = 1;
  while (next_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 7) {
      result.issues.push_back({lineno, errc::malformed_row, "expected 7 fields"});
      continue;
    }
    TransactionRecord r;
    bool ok = parse_i64(fields[0], r.timestamp);
    r.card_id = fields[1];
    r.merchant_id = fields[2];
    r.merchant_code = fields[3];
    ok = ok && parse_double(fields[4], r.amount);
    auto g = gender_from_code(fields[5]);
    ok = ok && g.has_value();
    ok = ok && parse_label(fields[6], r.label);
    if (!ok) {
      result.issues.push_back({lineno, errc::malformed_row, "bad field value"});
      continue;
    }
    if (g) r.gender = *g;
    if (r.amount < 0.0) {
      result.issues.push_back({lineno, errc::negative_amount, "amount < 0"});
      continue;
    }
    result.records.push_back(std::move(r));
  }
  if (result.records.empty() && result.issues.empty()) {
    result.issues.push_back({lineno, errc::empty_input, "no data rows"});
  }
  return result;
}

void write_transactions_csv(std::ostream& out, std::span<const TransactionRecord> records) {
  out << kTxnHeader << '\n';
  for (const auto& r : records) {
    out << r.timestamp << ',' << csv_escape(r.card_id) << ',' << csv_escape(r.merchant_id)
        << ',' << csv_escape(r.merchant_code) << ',' << format_double(r.amount) << ','
        << gender_code(r.gender) << ',' << r.label << '\n';
  }
}

ParseResult<ScoredRecord> read_scored_csv(std::istream& in) {
  ParseResult<ScoredRecord> result;
  std::string line;
  if (!next_line(in, line)) {
    result.issues.push_back({1, errc::empty_input, "empty file"});
    return result;
  }
  if (line != kScoredHeader) {
    result.issues.push_back({1, errc::malformed_row,
                             std::string("expected header '") + kScoredHeader + "'"});
    return result;
  }
  std::size_t lineno = 1;
  while (next_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 5) {
      result.issues.push_back({lineno, errc::malformed_row, "expected 5 fields"});
      continue;
    }
    ScoredRecord r;
    bool ok = parse_double(fields[0], r.score);
    ok = ok && parse_label(fields[1], r.label);
    auto g = gender_from_code(fields[2]);
    ok = ok && g.has_value();
    ok = ok && parse_double(fields[3], r.value);
    r.card_id = fields[4];
    if (!ok) {
      result.issues.push_back({lineno, errc::malformed_row, "bad field value"});
      continue;
    }
    if (g) r.group = *g;
    if (r.score < 0.0 || r.score > 1.0) {
      result.issues.push_back({lineno, errc::malformed_row, "score outside [0,1]"});
      continue;
    }
    if (r.value < 0.0) {
      result.issues.push_back({lineno, errc::negative_amount, "value < 0"});
      continue;
    }
    result.records.push_back(std::move(r));
  }
  if (result.records.empty() && result.issues.empty()) {
    result.issues.push_back({lineno, errc::empty_input, "no data rows"});
  }
  return result;
}

void write_scored_csv(std::ostream& out, std::span<const ScoredRecord> records) {
  out << kScoredHeader << '\n';
  for (const auto& r : records) {
    out << format_double(r.score) << ',' << r.label << ',' << gender_code(r.group) << ','
        << format_double(r.value) << ',' << csv_escape(r.card_id) << '\n';
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_failure, "cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io_failure, "cannot write: " + path);
  out << contents;
  if (!out) throw Error(errc::io_failure, "write failed: " + path);
}

ParseResult<TransactionRecord> read_transactions_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_failure, "cannot open: " + path);
  return read_transactions_csv(in);
}

ParseResult<ScoredRecord> read_scored_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_failure, "cannot open: " + path);
  return read_scored_csv(in);
}

void write_transactions_csv_file(const std::string& path, std::span<const TransactionRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io_failure, "cannot write: " + path);
  write_transactions_csv(out, records);
  if (!out) throw Error(errc::io_failure, "write failed: " + path);
}

void write_scored_csv_file(const std::string& path, std::span<const ScoredRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io_failure, "cannot write: " + path);
  write_scored_csv(out, records);
  if (!out) throw Error(errc::io_failure, "write failed: " + path);
}

}  // namespace fairaudit
