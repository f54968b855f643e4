#include <benchmark/benchmark.h>

#include "symprop/distributions.hpp"
#include "symprop/estimators.hpp"
#include "symprop/harness.hpp"
#include "symprop/pml_solver.hpp"
#include "symprop/poly_approx.hpp"
#include "symprop/profiles.hpp"

using namespace symprop;

static void BM_ProfileProbability(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dist = make_zipf(20, 1.0);
  const auto phi = extract_profile(sample(dist, n, 1));
  for (auto _ : state) benchmark::DoNotOptimize(profile_log_probability(dist, phi));
}
BENCHMARK(BM_ProfileProbability)->Arg(10)->Arg(20)->Arg(40);

static void BM_EnumerateProfiles(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_profiles(static_cast<std::uint32_t>(state.range(0))));
  }
}
BENCHMARK(BM_EnumerateProfiles)->Arg(20)->Arg(40);

static void BM_Remez(benchmark::State& state) {
  const auto L = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(best_poly_approx(NegYLogY{}, {0.0, 1.0}, L));
}
BENCHMARK(BM_Remez)->Arg(4)->Arg(10)->Arg(20);

static void BM_EntropyEstimate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto xs = sample(make_zipf(5000, 1.0), 2 * n, 3);
  const auto cfg = EstimatorConfig::performance();
  for (auto _ : state) benchmark::DoNotOptimize(entropy_estimate(SplitSample(xs), 5000, cfg));
}
BENCHMARK(BM_EntropyEstimate)->Arg(1000)->Arg(100000);

static void BM_SupportCoverage(benchmark::State& state) {
  const auto xs = sample(make_uniform(1000), 500, 4);
  const auto cfg = EstimatorConfig::paper();
  for (auto _ : state) benchmark::DoNotOptimize(support_coverage_estimate(xs, 1000, cfg));
}
BENCHMARK(BM_SupportCoverage);

static void BM_PmlOptimize(benchmark::State& state) {
  const Profile phi({1, 1, 1, 2, 2, 3, 4});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pml_optimize(phi, default_support_range(phi), static_cast<unsigned>(state.range(0)), 5));
  }
}
BENCHMARK(BM_PmlOptimize)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_SplitSwapProbe(benchmark::State& state) {
  const std::uint64_t n = 10000;
  const EntropySplitEstimator est(n, 1000, EstimatorConfig::paper());
  const auto xs = sample(make_uniform(1000), 2 * n, 6);
  const SplitSample split(xs);
  for (auto _ : state) benchmark::DoNotOptimize(split_swap_probe(est, split));
}
BENCHMARK(BM_SplitSwapProbe)->Unit(benchmark::kMillisecond);

static void BM_MetaTheorem(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(verify_ml_metatheorem({}));
}
BENCHMARK(BM_MetaTheorem)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
