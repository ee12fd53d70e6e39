#include <benchmark/benchmark.h>

#include "fairaudit/synthgen.hpp"

using namespace fairaudit;

static void BM_Generate(benchmark::State& state) {
  GeneratorConfig config;
  config.n_cards = static_cast<std::uint32_t>(state.range(0));
  config.duration_days = 120;
  config.txn_rate = 0.85;
  config.seed = 11;
  std::size_t produced = 0;
  for (auto _ : state) {
    const auto records = generate(config);
    produced = records.size();
    benchmark::DoNotOptimize(records.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(produced));
}
BENCHMARK(BM_Generate)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
