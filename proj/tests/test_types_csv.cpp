#include <doctest.h>

#include <sstream>

#include "fairaudit/csv.hpp"
#include "fairaudit/rng.hpp"
#include "fairaudit/types.hpp"

using namespace fairaudit;

namespace {

TransactionRecord txn(std::int64_t ts, const std::string& card, double amount,
                      Gender g = Gender::Male, int label = 0) {
  TransactionRecord r;
  r.timestamp = ts;
  r.card_id = card;
  r.merchant_id = "m1";
  r.merchant_code = "mc1";
  r.amount = amount;
  r.gender = g;
  r.label = label;
  return r;
}

}  // namespace

TEST_CASE("validate_records sorts by card then time") {
  std::vector<TransactionRecord> records = {txn(30, "c2", 1.0), txn(20, "c1", 1.0),
                                            txn(10, "c1", 1.0)};
  auto result = validate_records(records);
  REQUIRE(result.ok());
  CHECK(result.records[0].card_id == "c1");
  CHECK(result.records[0].timestamp == 10);
  CHECK(result.records[1].timestamp == 20);
  CHECK(result.records[2].card_id == "c2");
}

TEST_CASE("validate_records flags a negative amount with its row index") {
  std::vector<TransactionRecord> records = {txn(1, "c1", 5.0), txn(2, "c1", -5.0)};
  auto result = validate_records(records);
  REQUIRE(result.issues.size() == 1);
  CHECK(result.issues[0].row == 1);
  CHECK(result.issues[0].code == errc::negative_amount);
}

TEST_CASE("validate_records reports empty input") {
  auto result = validate_records({});
  REQUIRE(result.issues.size() == 1);
  CHECK(result.issues[0].code == errc::empty_input);
}

TEST_CASE("transactions csv round-trips exactly") {
  std::vector<TransactionRecord> records = {
      txn(1704067200, "c000001", 12.34, Gender::Female, 1),
      txn(1704067201, "c000002", 0.1 + 0.2, Gender::Male, 0),  // non-terminating binary fraction
      txn(1704067202, "c000003", 99999999.99, Gender::Female, 0),
  };
  std::ostringstream out;
  write_transactions_csv(out, records);
  std::istringstream in(out.str());
  auto parsed = read_transactions_csv(in);
  REQUIRE(parsed.ok());
  REQUIRE(parsed.records.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(parsed.records[i].timestamp == records[i].timestamp);
    CHECK(parsed.records[i].card_id == records[i].card_id);
    CHECK(parsed.records[i].amount == records[i].amount);  // exact
    CHECK(parsed.records[i].gender == records[i].gender);
    CHECK(parsed.records[i].label == records[i].label);
  }
}

TEST_CASE("scored csv round-trips random records exactly") {
  Rng rng(42);
  std::vector<ScoredRecord> records;
  for (int i = 0; i < 200; ++i) {
    ScoredRecord r;
    r.score = rng.uniform();
    r.label = rng.bernoulli(0.3) ? 1 : 0;
    r.group = rng.bernoulli(0.5) ? Gender::Male : Gender::Female;
    r.value = 1000.0 * rng.uniform();
    r.card_id = "c" + std::to_string(i);
    records.push_back(r);
  }
  std::ostringstream out;
  write_scored_csv(out, records);
  std::istringstream in(out.str());
  auto parsed = read_scored_csv(in);
  REQUIRE(parsed.ok());
  REQUIRE(parsed.records.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(parsed.records[i].score == records[i].score);
    CHECK(parsed.records[i].value == records[i].value);
    CHECK(parsed.records[i].label == records[i].label);
    CHECK(parsed.records[i].group == records[i].group);
    CHECK(parsed.records[i].card_id == records[i].card_id);
  }
}

TEST_CASE("malformed rows are collected with line numbers") {
  std::istringstream in(
      "timestamp,card_id,merchant_id,merchant_code,amount,gender,label\n"
      "100,c1,m1,mc1,5.0,M,0\n"
      "bad,c1,m1,mc1,5.0,M,0\n"
      "100,c1,m1,mc1,5.0,X,0\n"
      "100,c1,m1,mc1,5.0,M,2\n"
      "100,c1,m1,mc1,-1.0,M,1\n");
  auto parsed = read_transactions_csv(in);
  CHECK(parsed.records.size() == 1);
  REQUIRE(parsed.issues.size() == 4);
  CHECK(parsed.issues[0].row == 3);
  CHECK(parsed.issues[0].code == errc::malformed_row);
  CHECK(parsed.issues[3].row == 6);
  CHECK(parsed.issues[3].code == errc::negative_amount);
}

TEST_CASE("missing header is rejected") {
  std::istringstream in("100,c1,m1,mc1,5.0,M,0\n");
  auto parsed = read_transactions_csv(in);
  CHECK(!parsed.ok());
  CHECK(parsed.issues[0].row == 1);
}

TEST_CASE("empty file yields empty_input") {
  std::istringstream in("");
  auto parsed = read_transactions_csv(in);
  REQUIRE(parsed.issues.size() == 1);
  CHECK(parsed.issues[0].code == errc::empty_input);

  std::istringstream header_only("score,label,group,value,card_id\n");
  auto scored = read_scored_csv(header_only);
  REQUIRE(scored.issues.size() == 1);
  CHECK(scored.issues[0].code == errc::empty_input);
}

TEST_CASE("quoted identifiers survive the round trip") {
  std::vector<ScoredRecord> records(1);
  records[0].score = 0.5;
  records[0].card_id = "weird,id \"x\"";
  std::ostringstream out;
  write_scored_csv(out, records);
  std::istringstream in(out.str());
  auto parsed = read_scored_csv(in);
  REQUIRE(parsed.ok());
  CHECK(parsed.records[0].card_id == "weird,id \"x\"");
}

TEST_CASE("scores outside [0,1] are schema violations") {
  std::istringstream in(
      "score,label,group,value,card_id\n"
      "1.5,0,M,10,c1\n");
  auto parsed = read_scored_csv(in);
  CHECK(!parsed.ok());
}
