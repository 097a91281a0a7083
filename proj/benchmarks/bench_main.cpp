#include <benchmark/benchmark.h>

#include <vector>

#include "derivroots/measures.hpp"
#include "derivroots/metrics.hpp"
#include "derivroots/rootfind.hpp"
#include "derivroots/sympoly.hpp"

namespace {

using derivroots::Complex;

void BM_SymTable(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto roots = derivroots::sample(derivroots::make_circle(0.0, 1.0), n, 1);
  const derivroots::SymEvaluator ev(roots);
  for (auto _ : state) benchmark::DoNotOptimize(ev.table({0.3, 1.7}, k));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n * k));
}
BENCHMARK(BM_SymTable)->Args({100, 10})->Args({400, 10})->Args({1600, 29})->Args({1600, 200});

void BM_SymTableHp(benchmark::State& state) {
  const auto roots = derivroots::sample(derivroots::make_circle(0.0, 1.0), static_cast<std::size_t>(state.range(0)), 1);
  const derivroots::HpSymEvaluator ev(roots);
  for (auto _ : state) benchmark::DoNotOptimize(ev.table({0.3, 1.7}, 10));
}
BENCHMARK(BM_SymTableHp)->Arg(50)->Arg(200);

void BM_DerivativeRoots(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto method = state.range(2) ? derivroots::DerivativeMethod::coefficient : derivroots::DerivativeMethod::ratio;
  const auto roots = derivroots::RootSet::simple(derivroots::sample(derivroots::make_circle(0.0, 1.0), n, 2));
  for (auto _ : state) benchmark::DoNotOptimize(derivroots::derivative_roots(roots, k, method, 3));
}
BENCHMARK(BM_DerivativeRoots)
    ->Args({100, 4, 0})
    ->Args({100, 4, 1})
    ->Args({400, 10, 0})
    ->Args({200, 8, 1})
    ->Unit(benchmark::kMillisecond);

void BM_W1(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = derivroots::EmpiricalMeasure::uniform(derivroots::sample(derivroots::make_circle(0.0, 1.0), n, 4));
  const auto b = derivroots::EmpiricalMeasure::uniform(derivroots::sample(derivroots::make_circle(0.0, 1.0), n - n / 20, 5));
  for (auto _ : state) benchmark::DoNotOptimize(derivroots::w1_distance(a, b));
}
BENCHMARK(BM_W1)->Arg(100)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
