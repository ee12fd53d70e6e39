#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "fairaudit/metrics.hpp"

using namespace fairaudit;

static void BM_RocAuc(benchmark::State& state) {
  const auto records = bench::scored_records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(roc_auc(records));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocAuc)->Arg(10000)->Arg(100000)->Arg(1000000);

static void BM_PrAuc(benchmark::State& state) {
  const auto records = bench::scored_records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pr_auc(records));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PrAuc)->Arg(10000)->Arg(100000)->Arg(1000000);

static void BM_ThresholdSearch(benchmark::State& state) {
  const auto records = bench::scored_records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(threshold_for_fp_ratio(records, 5.0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ThresholdSearch)->Arg(10000)->Arg(100000)->Arg(1000000);

static void BM_ConfusionCounts(benchmark::State& state) {
  const auto records = bench::scored_records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(confusion_counts(records, 0.5));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConfusionCounts)->Arg(100000)->Arg(1000000);
