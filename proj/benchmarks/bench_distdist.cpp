#include <benchmark/benchmark.h>

#include "bindim/dimension.hpp"
#include "bindim/distdist.hpp"

using namespace bindim;

namespace {

BinaryDataset dataset(std::size_t k, std::size_t n, double p) {
  return gen_independent(k, n, MarginProfile{std::vector<double>(k, p)}, 1);
}

void exact_pairs(benchmark::State& state, DistanceKernel kernel) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const double p = static_cast<double>(state.range(1)) / 1000.0;
  const auto d = dataset(k, 1000, p);
  for (auto _ : state) benchmark::DoNotOptimize(exact_cdf(d, {.threads = 1, .kernel = kernel}));
  state.counters["ones"] = static_cast<double>(d.ones());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 1000 * 1000);
}

void BM_ExactSparse(benchmark::State& state) { exact_pairs(state, DistanceKernel::sparse_merge); }
void BM_ExactBitset(benchmark::State& state) { exact_pairs(state, DistanceKernel::bitset); }

// (K, density per mille): sparse wide data favours merging, dense data popcount.
BENCHMARK(BM_ExactSparse)->Args({100, 300})->Args({2000, 5})->Args({2000, 100})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactBitset)->Args({100, 300})->Args({2000, 5})->Args({2000, 100})->Unit(benchmark::kMillisecond);

// Time at fixed N and sample size against the number of ones.
void BM_SampledByOnes(benchmark::State& state) {
  const double p = static_cast<double>(state.range(0)) / 1000.0;
  const auto d = dataset(500, 5000, p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sampled_cdf(d, SampleMode::row_vs_sample, 500, 3, {.threads = 1, .kernel = DistanceKernel::sparse_merge}));
  }
  state.counters["ones"] = static_cast<double>(d.ones());
}
BENCHMARK(BM_SampledByOnes)->Arg(25)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_IndependentMc(benchmark::State& state) {
  const MarginProfile p{std::vector<double>(static_cast<std::size_t>(state.range(0)), 0.2)};
  for (auto _ : state) benchmark::DoNotOptimize(independent_mc_cdf(p, 10000, 5));
}
BENCHMARK(BM_IndependentMc)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_NormalizeDimension(benchmark::State& state) {
  const DimConfig cfg;
  const double target = cd_ind_model(300, 0.1, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(normalize_dimension(target * 0.6, target, 300, cfg));
}
BENCHMARK(BM_NormalizeDimension)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
