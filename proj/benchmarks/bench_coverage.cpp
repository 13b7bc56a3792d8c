#include <benchmark/benchmark.h>

#include "udn/ase.hpp"
#include "udn/coverage.hpp"
#include "udn/diagnostics.hpp"

namespace {

using namespace udn;

CoverageEngine engine(double lambda) {
  ScopedWarningSink quiet{WarningSink{}};
  NetworkConfig cfg;
  cfg.lambda = lambda;
  return CoverageEngine(cfg, make_3gpp_case());
}

void BM_LaplaceExponent(benchmark::State& state) {
  const auto eng = engine(1000.0);
  for (auto _ : state) benchmark::DoNotOptimize(eng.laplace_exponent(5e10, 0.02, Branch::LoS));
}
BENCHMARK(BM_LaplaceExponent);

void BM_CoverageRoundRobin(benchmark::State& state) {
  const auto eng = engine(static_cast<double>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(eng.coverage(1.0, SchedulerKind::RoundRobin, CoverageMethod::Exact).value);
}
BENCHMARK(BM_CoverageRoundRobin)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_CoverageProportionalFairExact(benchmark::State& state) {
  const auto eng = engine(static_cast<double>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(eng.coverage(1.0, SchedulerKind::ProportionalFair, CoverageMethod::Exact).value);
}
BENCHMARK(BM_CoverageProportionalFairExact)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_CoverageProportionalFairUpper(benchmark::State& state) {
  const auto eng = engine(static_cast<double>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(eng.coverage(1.0, SchedulerKind::ProportionalFair, CoverageMethod::UpperBound).value);
}
BENCHMARK(BM_CoverageProportionalFairUpper)->Arg(1)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_AseProportionalFair(benchmark::State& state) {
  ScopedWarningSink quiet{WarningSink{}};
  AseQuery q;
  q.cfg.lambda = 1000.0;
  for (auto _ : state) benchmark::DoNotOptimize(ase(q).value);
}
BENCHMARK(BM_AseProportionalFair)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
