#include <benchmark/benchmark.h>

#include "fairaudit/features.hpp"
#include "fairaudit/synthgen.hpp"

using namespace fairaudit;

namespace {

std::vector<TransactionRecord> world(std::uint32_t cards, std::uint32_t days) {
  GeneratorConfig config;
  config.n_cards = cards;
  config.duration_days = days;
  config.txn_rate = 1.5;
  config.base_fraud_rate = 0.02;
  config.seed = 7;
  return generate(config);
}

}  // namespace

static void BM_BuildFeatureMatrix(benchmark::State& state) {
  const auto txns = world(static_cast<std::uint32_t>(state.range(0)), 60);
  const auto mask = train_mask_by_time(txns, 0.5);
  FeatureConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_feature_matrix(txns, config, mask));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(txns.size()));
}
BENCHMARK(BM_BuildFeatureMatrix)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_RollingAggregates(benchmark::State& state) {
  const auto txns = world(static_cast<std::uint32_t>(state.range(0)), 60);
  std::vector<std::int64_t> times;
  std::vector<double> values;
  std::vector<std::uint32_t> keys;
  std::map<std::string, std::uint32_t> ids;
  auto sorted = txns;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  for (const auto& t : sorted) {
    times.push_back(t.timestamp);
    values.push_back(t.amount);
    keys.push_back(ids.try_emplace(t.card_id, static_cast<std::uint32_t>(ids.size()))
                       .first->second);
  }
  const std::vector<std::int64_t> windows = {86400, 7 * 86400, 30 * 86400};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rolling_aggregates(times, values, keys, windows));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(times.size()));
}
BENCHMARK(BM_RollingAggregates)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
