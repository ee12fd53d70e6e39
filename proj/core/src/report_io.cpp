#include "fairaudit/report_io.hpp"

#include <sstream>

#include <json.hpp>

#include "fairaudit/csv.hpp"
#include "fairaudit/version.hpp"

namespace fairaudit {

namespace {

using Json = nlohmann::ordered_json;

Json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

std::optional<double> opt_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

Json parity_json(const ParityValue& p) {
  Json gv = Json::array();
  for (const auto& g : p.group_values) {
    gv.push_back({{"group", g.group}, {"value", opt_json(g.value)}});
  }
  return Json{{"metric_name", p.metric_name},
              {"raw", opt_json(p.raw)},
              {"normalized", opt_json(p.normalized)},
              {"group_values", gv},
              {"grouping", to_string(p.grouping)},
              {"significant_raw", p.significant_raw},
              {"significant_normalized", p.significant_normalized}};
}

ParityValue parity_from(const Json& j) {
  ParityValue p;
  p.metric_name = j.at("metric_name").get<std::string>();
  p.raw = opt_from(j.at("raw"));
  p.normalized = opt_from(j.at("normalized"));
  for (const auto& g : j.at("group_values")) {
    p.group_values.push_back({g.at("group").get<std::string>(), opt_from(g.at("value"))});
  }
  auto grouping = grouping_from_string(j.at("grouping").get<std::string>());
  if (!grouping) throw Error(errc::malformed_row, "bad grouping in report JSON");
  p.grouping = *grouping;
  p.significant_raw = j.at("significant_raw").get<bool>();
  p.significant_normalized = j.at("significant_normalized").get<bool>();
  return p;
}

Json utilities_json(const UtilityMetrics& m) {
  return Json{{"tpr", opt_json(m.tpr)},
              {"fpr", opt_json(m.fpr)},
              {"ppv", opt_json(m.ppv)},
              {"npv", opt_json(m.npv)},
              {"f1", opt_json(m.f1)},
              {"predicted_positive_rate", opt_json(m.predicted_positive_rate)},
              {"vdr", opt_json(m.vdr)}};
}

UtilityMetrics utilities_from(const Json& j) {
  UtilityMetrics m;
  m.tpr = opt_from(j.at("tpr"));
  m.fpr = opt_from(j.at("fpr"));
  m.ppv = opt_from(j.at("ppv"));
  m.npv = opt_from(j.at("npv"));
  m.f1 = opt_from(j.at("f1"));
  m.predicted_positive_rate = opt_from(j.at("predicted_positive_rate"));
  m.vdr = opt_from(j.at("vdr"));
  return m;
}

Json search_json(const ThresholdSearchResult& s) {
  return Json{{"threshold", s.threshold},
              {"achieved_fp_ratio", s.achieved_fp_ratio},
              {"tpr_at_threshold", s.tpr_at_threshold},
              {"feasible", s.feasible}};
}

ThresholdSearchResult search_from(const Json& j) {
  ThresholdSearchResult s;
  s.threshold = j.at("threshold").get<double>();
  s.achieved_fp_ratio = j.at("achieved_fp_ratio").get<double>();
  s.tpr_at_threshold = j.at("tpr_at_threshold").get<double>();
  s.feasible = j.at("feasible").get<bool>();
  return s;
}

template <class T, class Fn>
Json per_group_json(const PerGroup<T>& pg, Fn&& fn) {
  Json out;
  for (Gender g : kGroups) out[to_string(g)] = fn(pg[g]);
  return out;
}

Json stat_json(const AggregateStat& s) {
  return Json{{"mean", opt_json(s.mean)}, {"std", opt_json(s.std_dev)}, {"excluded", s.excluded}};
}

AggregateStat stat_from(const Json& j) {
  AggregateStat s;
  s.mean = opt_from(j.at("mean"));
  s.std_dev = opt_from(j.at("std"));
  s.excluded = j.at("excluded").get<std::uint32_t>();
  return s;
}

}  // namespace

std::string report_to_json(const AuditReport& report) {
  Json j;
  j["schema"] = kReportSchema;
  j["tool_version"] = kToolVersion;
  j["mode"] = to_string(report.mode);
  j["policy"] = {{"bias_threshold", report.policy.bias_threshold},
                 {"normalization", "MaxDenominator"}};
  j["fp_ratio_targets"] = report.fp_ratio_targets;

  const bool global = report.mode == AuditMode::GlobalThreshold;

  Json chosen = Json::array();
  if (global && report.global_search) {
    chosen.push_back({{"fp_ratio_target", report.fp_ratio_targets.front()},
                      {"thresholds", Json{{"pooled", report.global_search->threshold}}}});
  }
  for (const auto& point : report.grid) {
    Json thresholds;
    for (Gender g : kGroups) {
      thresholds[to_string(g)] =
          point.search[g] ? Json(point.search[g]->threshold) : Json(nullptr);
    }
    chosen.push_back({{"fp_ratio_target", point.fp_ratio_target}, {"thresholds", thresholds}});
  }
  j["chosen_thresholds"] = chosen;

  if (global) {
    j["threshold_search"] =
        report.global_search ? search_json(*report.global_search) : Json(nullptr);
    j["per_group_utilities"] =
        per_group_json(report.per_group_utilities, [](const UtilityMetrics& m) {
          return utilities_json(m);
        });
    j["per_group_auc"] = per_group_json(report.per_group_auc, [](const GroupAuc& a) {
      return Json{{"roc_auc", opt_json(a.roc_auc)}, {"pr_auc", opt_json(a.pr_auc)}};
    });
    j["per_group_fp_ratio"] =
        per_group_json(report.per_group_fp_ratio, [](const std::optional<double>& v) {
          return opt_json(v);
        });
  } else {
    j["threshold_search"] = nullptr;
    j["per_group_utilities"] = nullptr;
    j["per_group_auc"] = nullptr;
    j["per_group_fp_ratio"] = nullptr;
  }

  Json grid = Json::array();
  for (const auto& point : report.grid) {
    Json p;
    p["fp_ratio_target"] = point.fp_ratio_target;
    p["threshold_search"] =
        per_group_json(point.search, [](const std::optional<ThresholdSearchResult>& s) {
          return s ? search_json(*s) : Json(nullptr);
        });
    p["per_group_utilities"] =
        per_group_json(point.utilities, [](const UtilityMetrics& m) {
          return utilities_json(m);
        });
    Json parities = Json::array();
    for (const auto& parity : point.parities) parities.push_back(parity_json(parity));
    p["parities"] = parities;
    grid.push_back(std::move(p));
  }
  j["grid"] = grid;

  Json parities = Json::array();
  for (const auto& parity : report.parities) parities.push_back(parity_json(parity));
  j["parities"] = parities;

  Json per_group_stats;
  for (Gender g : kGroups) {
    const auto& s = report.dataset_stats.per_group[g];
    per_group_stats[to_string(g)] = {{"n_records", s.n_records},
                                     {"n_positives", s.n_positives},
                                     {"fraud_rate", opt_json(s.fraud_rate)}};
  }
  j["dataset_stats"] = {{"n_records", report.dataset_stats.n_records},
                        {"per_group", per_group_stats},
                        {"true_fraud_rate_parity",
                         report.dataset_stats.true_fraud_rate_parity
                             ? parity_json(*report.dataset_stats.true_fraud_rate_parity)
                             : Json(nullptr)}};

  if (report.run_aggregate) {
    Json entries = Json::array();
    for (const auto& e : report.run_aggregate->parities) {
      entries.push_back({{"metric_name", e.metric_name},
                         {"fp_ratio_target", opt_json(e.fp_ratio_target)},
                         {"raw", stat_json(e.raw)},
                         {"normalized", stat_json(e.normalized)}});
    }
    j["run_aggregate"] = {{"n_runs", report.run_aggregate->n_runs}, {"parities", entries}};
  } else {
    j["run_aggregate"] = nullptr;
  }

  j["metadata"] = {{"vdr_value_basis", "gross_amount"},
                   {"normalized_eo", "mean"},
                   {"pr_auc_method", "average_precision"},
                   {"global_threshold_policy", "recomputed_per_run"},
                   {"early_stopping", "none"}};

  return j.dump(2) + "\n";
}

AuditReport report_from_json(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::malformed_row, std::string("bad report JSON: ") + e.what());
  }
  try {
    AuditReport report;
    auto mode = audit_mode_from_string(j.at("mode").get<std::string>());
    if (!mode) throw Error(errc::malformed_row, "bad mode in report JSON");
    report.mode = *mode;
    report.policy.bias_threshold = j.at("policy").at("bias_threshold").get<double>();
    report.fp_ratio_targets = j.at("fp_ratio_targets").get<std::vector<double>>();

    if (report.mode == AuditMode::GlobalThreshold) {
      if (!j.at("threshold_search").is_null()) {
        report.global_search = search_from(j.at("threshold_search"));
      }
      for (Gender g : kGroups) {
        report.per_group_utilities[g] =
            utilities_from(j.at("per_group_utilities").at(to_string(g)));
        const auto& auc = j.at("per_group_auc").at(to_string(g));
        report.per_group_auc[g] = {opt_from(auc.at("roc_auc")), opt_from(auc.at("pr_auc"))};
        report.per_group_fp_ratio[g] = opt_from(j.at("per_group_fp_ratio").at(to_string(g)));
      }
    }
    for (const auto& pj : j.at("grid")) {
      GroupwiseGridPoint point;
      point.fp_ratio_target = pj.at("fp_ratio_target").get<double>();
      for (Gender g : kGroups) {
        const auto& s = pj.at("threshold_search").at(to_string(g));
        if (!s.is_null()) point.search[g] = search_from(s);
        point.utilities[g] = utilities_from(pj.at("per_group_utilities").at(to_string(g)));
      }
      for (const auto& parity : pj.at("parities")) point.parities.push_back(parity_from(parity));
      report.grid.push_back(std::move(point));
    }
    for (const auto& parity : j.at("parities")) report.parities.push_back(parity_from(parity));

    const auto& ds = j.at("dataset_stats");
    report.dataset_stats.n_records = ds.at("n_records").get<std::uint64_t>();
    for (Gender g : kGroups) {
      const auto& s = ds.at("per_group").at(to_string(g));
      report.dataset_stats.per_group[g] = {s.at("n_records").get<std::uint64_t>(),
                                           s.at("n_positives").get<std::uint64_t>(),
                                           opt_from(s.at("fraud_rate"))};
    }
    if (!ds.at("true_fraud_rate_parity").is_null()) {
      report.dataset_stats.true_fraud_rate_parity = parity_from(ds.at("true_fraud_rate_parity"));
    }

    if (!j.at("run_aggregate").is_null()) {
      RunAggregate aggregate;
      aggregate.n_runs = j.at("run_aggregate").at("n_runs").get<std::uint32_t>();
      for (const auto& ej : j.at("run_aggregate").at("parities")) {
        RunAggregateEntry entry;
        entry.metric_name = ej.at("metric_name").get<std::string>();
        entry.fp_ratio_target = opt_from(ej.at("fp_ratio_target"));
        entry.raw = stat_from(ej.at("raw"));
        entry.normalized = stat_from(ej.at("normalized"));
        aggregate.parities.push_back(std::move(entry));
      }
      report.run_aggregate = std::move(aggregate);
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::malformed_row, std::string("bad report JSON: ") + e.what());
  }
}

std::string report_to_flat_csv(const AuditReport& report) {
  std::ostringstream out;
  out << "metric,group_a_value,group_b_value,raw,normalized,significant\n";
  auto cell = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  auto emit = [&](const std::string& name, const ParityValue& p) {
    std::optional<double> a, b;
    if (p.group_values.size() >= 2) {
      a = p.group_values[0].value;
      b = p.group_values[1].value;
    }
    out << name << ',' << cell(a) << ',' << cell(b) << ',' << cell(p.raw) << ','
        << cell(p.normalized) << ',' << (p.significant_normalized ? "true" : "false") << '\n';
  };
  if (report.mode == AuditMode::GlobalThreshold) {
    for (const auto& p : report.parities) emit(p.metric_name, p);
  } else {
    for (const auto& point : report.grid) {
      for (const auto& p : point.parities) {
        emit(p.metric_name + "@" + format_double(point.fp_ratio_target), p);
      }
    }
  }
  if (report.dataset_stats.true_fraud_rate_parity) {
    const auto& p = *report.dataset_stats.true_fraud_rate_parity;
    emit(p.metric_name, p);
  }
  return out.str();
}

}  // namespace fairaudit
