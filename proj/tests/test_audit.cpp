#include <doctest.h>

#include <cmath>

#include "fairaudit/audit.hpp"
#include "fairaudit/report_io.hpp"
#include "fairaudit/rng.hpp"
#include "oracles.hpp"

using namespace fairaudit;

namespace {

ScoredRecord rec(double score, int label, Gender g, double value = 1.0) {
  ScoredRecord r;
  r.score = score;
  r.label = label;
  r.group = g;
  r.value = value;
  r.card_id = "c";
  return r;
}

// Identical score distributions in both groups.
std::vector<ScoredRecord> symmetric_fixture(std::uint64_t seed, std::size_t per_group) {
  Rng rng(seed);
  std::vector<ScoredRecord> records;
  for (Gender g : kGroups) {
    Rng group_rng(seed);  // same stream for both groups
    for (std::size_t i = 0; i < per_group; ++i) {
      const int label = group_rng.bernoulli(0.05) ? 1 : 0;
      const double score =
          label == 1 ? 0.5 + 0.5 * group_rng.uniform() : 0.6 * group_rng.uniform();
      records.push_back(rec(score, label, g, 10.0));
    }
  }
  (void)rng;
  return records;
}

}  // namespace

TEST_CASE("split_by_group partitions preserving order") {
  std::vector<ScoredRecord> records = {rec(0.1, 0, Gender::Male), rec(0.2, 0, Gender::Female),
                                       rec(0.3, 0, Gender::Male), rec(0.4, 0, Gender::Female),
                                       rec(0.5, 0, Gender::Female)};
  auto groups = split_by_group(records);
  CHECK(groups.male.size() == 2);
  CHECK(groups.female.size() == 3);
  CHECK(groups.male[0].score == doctest::Approx(0.1));
  CHECK(groups.male[1].score == doctest::Approx(0.3));

  std::vector<ScoredRecord> all_male = {rec(0.1, 0, Gender::Male)};
  auto degenerate = split_by_group(all_male);
  CHECK(degenerate.male.size() == 1);
  CHECK(degenerate.female.empty());

  auto empty = split_by_group({});
  CHECK(empty.male.empty());
  CHECK(empty.female.empty());
}

TEST_CASE("dataset bias on pinned rates") {
  // 59 / 10000 vs 53 / 10000.
  std::vector<ScoredRecord> records;
  for (int i = 0; i < 10000; ++i) records.push_back(rec(0.1, i < 59 ? 1 : 0, Gender::Male));
  for (int i = 0; i < 10000; ++i) records.push_back(rec(0.1, i < 53 ? 1 : 0, Gender::Female));
  auto p = dataset_bias(records);
  CHECK(p.metric_name == "true_fraud_rate_parity");
  CHECK(p.grouping == Grouping::Dataset);
  CHECK(*p.raw == doctest::Approx(0.0006).epsilon(1e-12));
  CHECK(*p.normalized == doctest::Approx(0.0006 / 0.0059).epsilon(1e-9));
  CHECK(*p.normalized == doctest::Approx(0.1017).epsilon(1e-3));

  std::vector<ScoredRecord> equal;
  for (int i = 0; i < 100; ++i) {
    equal.push_back(rec(0.1, i % 10 == 0 ? 1 : 0, Gender::Male));
    equal.push_back(rec(0.1, i % 10 == 0 ? 1 : 0, Gender::Female));
  }
  CHECK(*dataset_bias(equal).raw == doctest::Approx(0.0));

  std::vector<ScoredRecord> one_group = {rec(0.1, 1, Gender::Male)};
  CHECK_THROWS_AS((void)dataset_bias(one_group), Error);
}

TEST_CASE("audit_global on a symmetric fixture shows no parity") {
  const auto records = symmetric_fixture(99, 2000);
  AuditConfig config;
  const auto report = audit_global(records, config);
  REQUIRE(report.global_search.has_value());
  CHECK(report.parities.size() == global_metric_names().size());
  for (const auto& p : report.parities) {
    REQUIRE(p.raw.has_value());
    CHECK(*p.raw == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(!p.significant_normalized);
  }
}

TEST_CASE("audit_global: constructed 2x fpr gap normalizes to one half") {
  // At the global threshold 0.5: male genuines 200 with 20 above (fpr 0.1),
  // female genuines 200 with 10 above (fpr 0.05). Frauds identical between
  // groups keep the pooled search stable.
  std::vector<ScoredRecord> records;
  for (Gender g : kGroups) {
    const int above = g == Gender::Male ? 20 : 10;
    for (int i = 0; i < 200; ++i) {
      records.push_back(rec(i < above ? 0.7 : 0.2, 0, g));
    }
    for (int i = 0; i < 30; ++i) records.push_back(rec(0.9, 1, g, 5.0));
  }
  AuditConfig config;
  config.global_fp_ratio = 1.0;
  const auto report = audit_global(records, config);
  CHECK(*report.per_group_utilities.male.fpr == doctest::Approx(0.1));
  CHECK(*report.per_group_utilities.female.fpr == doctest::Approx(0.05));
  for (const auto& p : report.parities) {
    if (p.metric_name == "fpr_parity") {
      CHECK(*p.normalized == doctest::Approx(0.5));
      CHECK(p.significant_normalized);
    }
  }
}

TEST_CASE("audit_global requires pooled positives") {
  std::vector<ScoredRecord> records = {rec(0.5, 0, Gender::Male), rec(0.4, 0, Gender::Female)};
  AuditConfig config;
  CHECK_THROWS_AS((void)audit_global(records, config), Error);
}

TEST_CASE("audit_global with an empty group reports undefined parities") {
  std::vector<ScoredRecord> records;
  for (int i = 0; i < 100; ++i) records.push_back(rec(i < 5 ? 0.9 : 0.1, i < 5 ? 1 : 0, Gender::Male));
  AuditConfig config;
  const auto report = audit_global(records, config);
  for (const auto& p : report.parities) {
    CHECK(!p.raw.has_value());
    CHECK(!p.significant_raw);
    CHECK(!p.significant_normalized);
  }
  CHECK(!report.dataset_stats.per_group.female.fraud_rate.has_value());
}

TEST_CASE("audit_groupwise identical groups yield zero parity on every grid point") {
  const auto records = symmetric_fixture(123, 1500);
  AuditConfig config;
  config.fp_ratio_grid = {5.0, 2.0, 1.0, 0.5};
  const auto report = audit_groupwise(records, config);
  REQUIRE(report.grid.size() == 4);
  for (const auto& point : report.grid) {
    for (const auto& p : point.parities) {
      if (p.raw) CHECK(*p.raw == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
  CHECK(report.parities.size() == 8);  // flattened, two families per point
}

TEST_CASE("audit_groupwise: low-scoring high-value frauds split vdr from tpr parity") {
  // Both groups catch 90 of 100 frauds at their thresholds. Male fraud value
  // is uniform; the female group's missed frauds carry nearly all its value.
  std::vector<ScoredRecord> records;
  for (int i = 0; i < 100; ++i) {
    records.push_back(rec(i < 90 ? 0.9 : 0.05, 1, Gender::Male, 100.0));
    records.push_back(rec(i < 90 ? 0.9 : 0.05, 1, Gender::Female, i < 90 ? 10.0 : 1000.0));
  }
  for (int i = 0; i < 10000; ++i) {
    records.push_back(rec(0.5 * (i % 100) / 100.0, 0, Gender::Male, 50.0));
    records.push_back(rec(0.5 * (i % 100) / 100.0, 0, Gender::Female, 50.0));
  }
  AuditConfig config;
  config.fp_ratio_grid = {1.0};
  const auto report = audit_groupwise(records, config);
  REQUIRE(report.grid.size() == 1);
  const auto& point = report.grid[0];
  std::optional<double> tpr_parity, vdr_parity;
  for (const auto& p : point.parities) {
    if (p.metric_name == "tpr_at_fp_ratio_parity") tpr_parity = p.raw;
    if (p.metric_name == "vdr_at_fp_ratio_parity") vdr_parity = p.raw;
  }
  REQUIRE(tpr_parity.has_value());
  REQUIRE(vdr_parity.has_value());
  CHECK(*tpr_parity < 0.05);
  CHECK(*vdr_parity > 0.05);
  CHECK(*utility_metrics(confusion_counts(split_by_group(records).female,
                                          point.search.female->threshold))
             .vdr == doctest::Approx(900.0 / 10900.0));
}

TEST_CASE("audit_groupwise reports a group without positives as undefined") {
  std::vector<ScoredRecord> records;
  for (int i = 0; i < 50; ++i) {
    records.push_back(rec(i < 5 ? 0.9 : 0.1, i < 5 ? 1 : 0, Gender::Male));
    records.push_back(rec(0.1, 0, Gender::Female));
  }
  AuditConfig config;
  config.fp_ratio_grid = {1.0};
  const auto report = audit_groupwise(records, config);
  CHECK(!report.grid[0].search.female.has_value());
  for (const auto& p : report.grid[0].parities) {
    CHECK(!p.raw.has_value());
  }
}

TEST_CASE("group permutation leaves parities unchanged") {
  Rng rng(7);
  std::vector<ScoredRecord> records;
  for (int i = 0; i < 4000; ++i) {
    const Gender g = rng.bernoulli(0.5) ? Gender::Male : Gender::Female;
    const int label = rng.bernoulli(g == Gender::Male ? 0.08 : 0.04) ? 1 : 0;
    const double score = label == 1 ? 0.4 + 0.6 * rng.uniform() : 0.7 * rng.uniform();
    records.push_back(rec(score, label, g, 1.0 + 50.0 * rng.uniform()));
  }
  auto swapped = records;
  for (auto& r : swapped) r.group = r.group == Gender::Male ? Gender::Female : Gender::Male;

  AuditConfig config;
  for (auto mode : {AuditMode::GlobalThreshold, AuditMode::GroupwiseThreshold}) {
    config.mode = mode;
    const auto a = mode == AuditMode::GlobalThreshold ? audit_global(records, config)
                                                      : audit_groupwise(records, config);
    const auto b = mode == AuditMode::GlobalThreshold ? audit_global(swapped, config)
                                                      : audit_groupwise(swapped, config);
    REQUIRE(a.parities.size() == b.parities.size());
    for (std::size_t i = 0; i < a.parities.size(); ++i) {
      CHECK(a.parities[i].raw.has_value() == b.parities[i].raw.has_value());
      if (a.parities[i].raw) {
        CHECK(*a.parities[i].raw == doctest::Approx(*b.parities[i].raw).epsilon(1e-15));
      }
      if (a.parities[i].normalized) {
        CHECK(*a.parities[i].normalized ==
              doctest::Approx(*b.parities[i].normalized).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("pooled counts equal the sum of per-group counts at the global threshold") {
  Rng rng(8);
  std::vector<ScoredRecord> records;
  for (int i = 0; i < 3000; ++i) {
    const Gender g = rng.bernoulli(0.4) ? Gender::Male : Gender::Female;
    const int label = rng.bernoulli(0.06) ? 1 : 0;
    records.push_back(rec(rng.uniform(), label, g));
  }
  AuditConfig config;
  const auto report = audit_global(records, config);
  const double tau = report.global_search->threshold;
  const auto pooled = confusion_counts(records, tau);
  const auto groups = split_by_group(records);
  const auto male = confusion_counts(groups.male, tau);
  const auto female = confusion_counts(groups.female, tau);
  CHECK(pooled.tp == male.tp + female.tp);
  CHECK(pooled.fp == male.fp + female.fp);
  CHECK(pooled.tn == male.tn + female.tn);
  CHECK(pooled.fn == male.fn + female.fn);
}

TEST_CASE("determinism: identical input and config give byte-identical reports") {
  const auto records = symmetric_fixture(5, 800);
  AuditConfig config;
  CHECK(report_to_json(audit_global(records, config)) ==
        report_to_json(audit_global(records, config)));
  config.mode = AuditMode::GroupwiseThreshold;
  CHECK(report_to_json(audit_groupwise(records, config)) ==
        report_to_json(audit_groupwise(records, config)));
}

TEST_CASE("aggregate_runs statistics and exclusions") {
  const auto records = symmetric_fixture(11, 500);
  AuditConfig config;
  auto base = audit_global(records, config);

  SUBCASE("identical reports have zero std") {
    std::vector<AuditReport> reports(10, base);
    const auto agg = aggregate_runs(reports);
    REQUIRE(agg.run_aggregate.has_value());
    CHECK(agg.run_aggregate->n_runs == 10);
    for (const auto& e : agg.run_aggregate->parities) {
      if (e.raw.mean) CHECK(*e.raw.std_dev == doctest::Approx(0.0));
    }
  }

  SUBCASE("two-point statistics") {
    auto a = base, b = base;
    a.parities[0].raw = 0.1;
    b.parities[0].raw = 0.3;
    const auto agg = aggregate_runs(std::vector<AuditReport>{a, b});
    CHECK(*agg.run_aggregate->parities[0].raw.mean == doctest::Approx(0.2));
    CHECK(*agg.run_aggregate->parities[0].raw.std_dev == doctest::Approx(0.1));
  }

  SUBCASE("undefined runs are excluded and counted") {
    std::vector<AuditReport> reports(10, base);
    for (auto& r : reports) r.parities[0].raw = 0.2;
    reports[3].parities[0].raw.reset();
    const auto agg = aggregate_runs(reports);
    CHECK(*agg.run_aggregate->parities[0].raw.mean == doctest::Approx(0.2));
    CHECK(agg.run_aggregate->parities[0].raw.excluded == 1);
  }

  SUBCASE("single run drops the std field") {
    const auto agg = aggregate_runs(std::vector<AuditReport>{base});
    for (const auto& e : agg.run_aggregate->parities) {
      CHECK(!e.raw.std_dev.has_value());
    }
  }

  SUBCASE("mismatched configs are rejected") {
    auto other_cfg = config;
    other_cfg.global_fp_ratio = 2.0;
    const auto other = audit_global(records, other_cfg);
    CHECK_THROWS_AS((void)aggregate_runs(std::vector<AuditReport>{base, other}), Error);
  }
}

TEST_CASE("groupwise aggregate entries carry their grid target") {
  const auto records = symmetric_fixture(13, 700);
  AuditConfig config;
  config.fp_ratio_grid = {5.0, 1.0};
  auto report = audit_groupwise(records, config);
  const auto agg = aggregate_runs(std::vector<AuditReport>{report, report});
  REQUIRE(agg.run_aggregate->parities.size() == 4);
  CHECK(*agg.run_aggregate->parities[0].fp_ratio_target == doctest::Approx(5.0));
  CHECK(*agg.run_aggregate->parities[2].fp_ratio_target == doctest::Approx(1.0));
}

TEST_CASE("report json round-trips through parse") {
  const auto records = symmetric_fixture(17, 600);
  AuditConfig config;
  auto report = audit_global(records, config);
  const auto text = report_to_json(report);
  const auto parsed = report_from_json(text);
  CHECK(report_to_json(parsed) == text);

  config.mode = AuditMode::GroupwiseThreshold;
  auto gw = audit_groupwise(records, config);
  const auto gw_text = report_to_json(gw);
  CHECK(report_to_json(report_from_json(gw_text)) == gw_text);
}

TEST_CASE("invalid audit configs are rejected") {
  AuditConfig config;
  config.global_fp_ratio = 0.0;
  CHECK_THROWS_AS(validate(config), Error);
  config = {};
  config.fp_ratio_grid = {2.0, 2.0};
  CHECK_THROWS_AS(validate(config), Error);
  config = {};
  config.fp_ratio_grid = {2.0, -1.0};
  CHECK_THROWS_AS(validate(config), Error);
  config = {};
  config.enabled_metrics = {"not_a_metric"};
  CHECK_THROWS_AS(validate(config), Error);
}

TEST_CASE("enabled metrics subset controls the parity list and the gate") {
  const auto records = symmetric_fixture(21, 400);
  AuditConfig config;
  config.enabled_metrics = {"tpr_parity", "fpr_parity"};
  const auto report = audit_global(records, config);
  REQUIRE(report.parities.size() == 2);
  CHECK(report.parities[0].metric_name == "tpr_parity");
  CHECK(report.parities[1].metric_name == "fpr_parity");
  CHECK(!any_significant_normalized(report));
}
