#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fairaudit/types.hpp"

namespace fairaudit {

template <class Record>
struct ParseResult {
  std::vector<Record> records;
  std::vector<RowIssue> issues;  // row = 1-based file line number

  bool ok() const { return issues.empty(); }
};

// Shortest representation that parses back to the same double.
std::string format_double(double value);

// Transactions CSV, header required:
//   timestamp,card_id,merchant_id,merchant_code,amount,gender,label
// gender in {M,F}; label in {0,1}.
ParseResult<TransactionRecord> read_transactions_csv(std::istream& in);
ParseResult<TransactionRecord> read_transactions_csv_file(const std::string& path);
void write_transactions_csv(std::ostream& out, std::span<const TransactionRecord> records);
void write_transactions_csv_file(const std::string& path, std::span<const TransactionRecord> records);

// Scored CSV, header required:
//   score,label,group,value,card_id
ParseResult<ScoredRecord> read_scored_csv(std::istream& in);
ParseResult<ScoredRecord> read_scored_csv_file(const std::string& path);
void write_scored_csv(std::ostream& out, std::span<const ScoredRecord> records);
void write_scored_csv_file(const std::string& path, std::span<const ScoredRecord> records);

// Splits one CSV line into fields. Double quotes delimit fields containing
// commas; "" inside a quoted field is a literal quote.
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_escape(const std::string& field);

std::string read_text_file(const std::string& path);    // throws Error(io_failure)
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace fairaudit
