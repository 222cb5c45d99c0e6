// Serial reference vs OpenMP kernels, and the direct vs fast solvers.

#include <benchmark/benchmark.h>

#include "deql/gram.hpp"
#include "deql/oracle.hpp"
#include "deql/parallel.hpp"
#include "deql/solvers.hpp"
#include "deql/synthetic.hpp"

namespace {

using namespace deql;

const Hyperparameters kHp{.a = 1, .b = 0.5, .p = 0.3};

Execution exec_arg(const benchmark::State& state) {
  return state.range(1) ? Execution::parallel : Execution::serial;
}

void BM_GramReference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto r = random_interactions(4 * n, n, 0.05, 1);
  for (auto _ : state) benchmark::DoNotOptimize(gram_reference(r).gram.data());
}

void BM_Gram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto r = random_interactions(4 * n, n, 0.05, 1);
  for (auto _ : state) benchmark::DoNotOptimize(gram(r, exec_arg(state)).gram.data());
}

void BM_SolveDirect(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = gram(random_interactions(2 * n, n, 0.1, 2));
  SolveOptions options;
  options.exec = exec_arg(state);
  for (auto _ : state) benchmark::DoNotOptimize(solve_direct(g, kHp, options).w.data());
}

void BM_SolveFast(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = gram(random_interactions(2 * n, n, 0.1, 2));
  SolveOptions options;
  options.exec = exec_arg(state);
  for (auto _ : state) benchmark::DoNotOptimize(solve_fast(g, kHp, options).w.data());
}

void BM_SampleLoss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto r = random_interactions(2 * n, n, 0.1, 3);
  const Matrix w = solve_fast(gram(r), kHp).w;
  for (auto _ : state) benchmark::DoNotOptimize(sample_loss(r, w, kHp, 200, 4, exec_arg(state)).mean);
}

BENCHMARK(BM_GramReference)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gram)->ArgsProduct({{200, 800}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveDirect)->ArgsProduct({{50, 100, 200}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveFast)->ArgsProduct({{50, 100, 200, 400}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleLoss)->ArgsProduct({{30}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
