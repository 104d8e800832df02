#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "softshock/distributions.hpp"
#include "softshock/effective.hpp"
#include "softshock/kernels.hpp"
#include "softshock/quadops.hpp"
#include "softshock/specfun.hpp"
#include "softshock/tasep.hpp"

namespace {

using namespace softshock;

void BM_AiryTaylorRegion(benchmark::State& state) {
  double x = -7.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(airy_ai(x));
    x += 0.013;
    if (x > 7.9) x = -7.9;
  }
}
BENCHMARK(BM_AiryTaylorRegion);

void BM_AiryAsymptotic(benchmark::State& state) {
  double x = 8.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(airy_ai(x));
    x += 0.37;
    if (x > 60.0) x = 8.5;
  }
}
BENCHMARK(BM_AiryAsymptotic);

void BM_GoeDeterminant(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fredholm_det(goe_operator(make_grid(-1.0, 12.0, n))));
  }
}
BENCHMARK(BM_GoeDeterminant)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SoftShockCdf(benchmark::State& state) {
  const double beta = static_cast<double>(state.range(0)) / 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(softshock_cdf(beta, 0.0, -0.5));
}
BENCHMARK(BM_SoftShockCdf)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_TasepEvents(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  std::uint64_t seed = 1;
  std::int64_t events = 0;
  for (auto _ : state) {
    const ShockTrial trial = simulate_shock_trial(t, 1.0, 0.0, seed, 0);
    events += static_cast<std::int64_t>(trial.events);
    ++seed;
  }
  state.counters["events/s"] =
      benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_TasepEvents)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_HypoMonteCarlo(benchmark::State& state) {
  const auto paths = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(brownian_hypo_estimate(1.0, 0.5, 0.3, paths, 1e-3, 20.0, 7));
  }
  state.SetItemsProcessed(state.iterations() * paths);
}
BENCHMARK(BM_HypoMonteCarlo)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
