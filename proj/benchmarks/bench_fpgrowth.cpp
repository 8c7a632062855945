#include <algorithm>
#include <random>

#include <benchmark/benchmark.h>

#include "riskpat/fpgrowth.hpp"

namespace {

std::vector<riskpat::Transaction> random_transactions(std::size_t count, int items, double density) {
  std::mt19937_64 rng(42);
  std::bernoulli_distribution holds(density);
  std::vector<riskpat::Transaction> tx(count);
  for (auto& t : tx) {
    for (int i = 0; i < items; ++i) {
      if (holds(rng)) t.push_back(static_cast<riskpat::Item>(i));
    }
  }
  return tx;
}

void BM_FpGrowthDense(benchmark::State& state) {
  const auto tx = random_transactions(static_cast<std::size_t>(state.range(0)), 60, 0.3);
  riskpat::FpGrowthOptions opts;
  opts.min_support = tx.size() / 100 + 1;
  opts.max_depth = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(riskpat::fp_growth(tx, opts).itemsets.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FpGrowthDense)->Arg(500)->Arg(3000)->Unit(benchmark::kMillisecond);

// County-shaped input: 20 features x 5 interval items, one per bin run.
void BM_FpGrowthCountyShape(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> bin(0, 2);
  std::vector<riskpat::Transaction> tx(3000);
  std::vector<std::size_t> groups;
  for (int f = 0; f < 20; ++f) {
    for (int k = 0; k < 5; ++k) groups.push_back(static_cast<std::size_t>(f));
  }
  for (auto& t : tx) {
    for (int f = 0; f < 20; ++f) {
      const int b = bin(rng);
      // items per feature: [0],[1],[2],[0-1],[1-2]
      t.push_back(static_cast<riskpat::Item>(f * 5 + b));
      if (b <= 1) t.push_back(static_cast<riskpat::Item>(f * 5 + 3));
      if (b >= 1) t.push_back(static_cast<riskpat::Item>(f * 5 + 4));
    }
    std::sort(t.begin(), t.end());
  }
  riskpat::FpGrowthOptions opts;
  opts.min_support = 20;
  opts.max_depth = static_cast<int>(state.range(0));
  opts.item_groups = groups;
  for (auto _ : state) {
    benchmark::DoNotOptimize(riskpat::fp_growth(tx, opts).itemsets.size());
  }
}
BENCHMARK(BM_FpGrowthCountyShape)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
