#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "fairaudit/audit.hpp"

using namespace fairaudit;

static void BM_AuditGlobal(benchmark::State& state) {
  const auto records = bench::scored_records(static_cast<std::size_t>(state.range(0)));
  AuditConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(audit_global(records, config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AuditGlobal)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_AuditGroupwise(benchmark::State& state) {
  const auto records = bench::scored_records(static_cast<std::size_t>(state.range(0)));
  AuditConfig config;
  config.fp_ratio_grid = {5.0, 2.0, 1.0, 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(audit_groupwise(records, config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AuditGroupwise)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
