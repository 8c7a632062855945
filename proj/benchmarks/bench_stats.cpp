#include <numeric>
#include <random>

#include <benchmark/benchmark.h>

#include "riskpat/stats.hpp"

namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void BM_MannWhitneyExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = normal_sample(n, 1);
  const auto b = normal_sample(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(riskpat::stats::mann_whitney(a, b).p_one_sided);
}
BENCHMARK(BM_MannWhitneyExact)->DenseRange(4, 8, 2);

void BM_MannWhitneyNormal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = normal_sample(n / 10, 1);
  const auto b = normal_sample(n - n / 10, 2);
  for (auto _ : state) benchmark::DoNotOptimize(riskpat::stats::mann_whitney(a, b).p_one_sided);
}
BENCHMARK(BM_MannWhitneyNormal)->Arg(300)->Arg(3000);

// Split test against a pre-ranked pool, as the miner does per candidate.
void BM_RankedSampleSplit(benchmark::State& state) {
  const riskpat::stats::RankedSample pool(normal_sample(3000, 3));
  std::vector<std::size_t> inside(static_cast<std::size_t>(state.range(0)));
  std::iota(inside.begin(), inside.end(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(pool.test(inside).p_one_sided);
}
BENCHMARK(BM_RankedSampleSplit)->Arg(30)->Arg(300);

void BM_ChiSquare(benchmark::State& state) {
  const riskpat::stats::CountTable table{{20, 10, 7}, {10, 20, 9}, {4, 5, 30}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(riskpat::stats::chi_square_independence(table).p);
  }
}
BENCHMARK(BM_ChiSquare);

}  // namespace

BENCHMARK_MAIN();
