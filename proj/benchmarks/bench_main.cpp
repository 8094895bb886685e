#include "fnls/kernel.hpp"
#include "fnls/noise.hpp"
#include "fnls/solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace fnls;

namespace {

void BM_KernelEval(benchmark::State& state) {
  const HurstKernel k(state.range(0) / 100.0);
  double t = 0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k(t, 0.3));
    t = t < 0.95 ? t + 1e-6 : 0.9;
  }
}
BENCHMARK(BM_KernelEval)->Arg(30)->Arg(70);

void BM_FbmExact(benchmark::State& state) {
  const TimeGrid tg(1.0, static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_fbm_exact(0.7, tg, 16, ++seed));
}
BENCHMARK(BM_FbmExact)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_FbmFast(benchmark::State& state) {
  const TimeGrid tg(1.0, static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_fbm_fast(0.7, tg, 16, ++seed));
}
BENCHMARK(BM_FbmFast)->Arg(256)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

void BM_SolverSteps(benchmark::State& state) {
  const GridSpec grid(1, static_cast<int>(state.range(0)), 20.0);
  const ComplexField u0 = ComplexField::from_function(grid, [](double x, double) { return std::sqrt(2.0) / std::cosh(x); });
  const SolverConfig cfg{0.1, 1e-3, 0, 0};
  for (auto _ : state) benchmark::DoNotOptimize(solve_mild(u0, NonlinearitySpec::kerr(1.0, 1.0), nullptr, 0.0, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.steps());
}
BENCHMARK(BM_SolverSteps)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_LOperatorBuild(benchmark::State& state) {
  const GridSpec grid(1, 8, std::numbers::pi);
  const CorrelationSpec spec = build_correlation(grid, 4.0, 0.7, 0.2, 8);
  const HurstKernel k(0.7);
  const TimeGrid tg(1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(DiscreteLOperator(spec, k, tg));
}
BENCHMARK(BM_LOperatorBuild)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_ConvolutionSample(benchmark::State& state) {
  const GridSpec grid(1, 8, std::numbers::pi);
  const CorrelationSpec spec = build_correlation(grid, 4.0, 0.7, 0.2, 8);
  const DiscreteLOperator op(spec, HurstKernel(0.7), TimeGrid(1.0, 16));
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(op.sample(1, ++r));
}
BENCHMARK(BM_ConvolutionSample)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
