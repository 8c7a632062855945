#include <benchmark/benchmark.h>

#include "riskpat/miner.hpp"
#include "riskpat/synthetic.hpp"

namespace {

void BM_MinePlanted(benchmark::State& state) {
  riskpat::synthetic::PlantedOptions opts;
  opts.counties = static_cast<std::size_t>(state.range(0));
  opts.features = 20;
  const auto data = riskpat::synthetic::generate_planted(opts);
  riskpat::MiningConfig config;
  config.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(riskpat::mine(data.matrix, config).patterns.size());
  }
}
BENCHMARK(BM_MinePlanted)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
