// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <numbers>

#include "pararelax/count_table.hpp"
#include "pararelax/sampling.hpp"

using namespace pararelax;

namespace {

const ParaApproximation& sin_approx() {
  static const ParaApproximation a =
      approximate(UnivariateFunction::of(FunctionKind::Sin), {0, 2 * std::numbers::pi}, 1e-3, Side::Under);
  return a;
}

const PwlApproximation& exp_relaxation() {
  static const PwlApproximation p = relax_shift(UnivariateFunction::of(FunctionKind::Exp), {-5, 5}, 1e-3);
  return p;
}

void BM_ParaViolationsSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sampling::para_violations_serial(sin_approx(), state.range(0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ParaViolationsParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sampling::para_violations_parallel(sin_approx(), state.range(0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PwlViolationsSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sampling::pwl_violations_serial(exp_relaxation(), state.range(0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PwlViolationsParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sampling::pwl_violations_parallel(exp_relaxation(), state.range(0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CountTable(benchmark::State& state, Execution exec) {
  CountTableOptions opt;
  opt.epsilons = {1.0, 0.1, 0.01};
  opt.samples = 20'000;
  opt.jobs = sampling::max_threads();
  for (auto _ : state) benchmark::DoNotOptimize(count_table(FunctionKind::Sin, opt, exec));
}

}  // namespace

BENCHMARK(BM_ParaViolationsSerial)->Arg(10'000)->Arg(100'000);
BENCHMARK(BM_ParaViolationsParallel)->Arg(10'000)->Arg(100'000);
BENCHMARK(BM_PwlViolationsSerial)->Arg(10'000)->Arg(100'000);
BENCHMARK(BM_PwlViolationsParallel)->Arg(10'000)->Arg(100'000);
BENCHMARK_CAPTURE(BM_CountTable, serial, Execution::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CountTable, parallel, Execution::Parallel)->Unit(benchmark::kMillisecond);
int main(int argc, char** argv) {
  // build the fixtures outside any timed region
  sin_approx();
  exp_relaxation();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
