#include <benchmark/benchmark.h>

#include "spectradiag/association.hpp"
#include "spectradiag/null_validation.hpp"
#include "spectradiag/selection.hpp"
#include "spectradiag/spectral.hpp"
#include "spectradiag/synthetic.hpp"

using namespace spectradiag;

namespace {

ScoreMatrix irt(Eigen::Index tasks, Eigen::Index models, Eigen::Index k) {
  IrtSpec spec;
  spec.k = k;
  spec.tasks = tasks;
  spec.models = models;
  spec.discrimination_scale = 2.5;
  spec.seed = 1;
  return gen_irt_matrix(spec);
}

void BM_MatrixEd(benchmark::State& state) {
  const ScoreMatrix m = irt(state.range(0), state.range(1), 5);
  for (auto _ : state) benchmark::DoNotOptimize(matrix_ed(m));
}
BENCHMARK(BM_MatrixEd)->Args({500, 100})->Args({2000, 150})->Args({5000, 1000})->Unit(benchmark::kMillisecond);

void BM_EdGreedy(benchmark::State& state) {
  const ScoreMatrix m = irt(state.range(0), 100, 10);
  for (auto _ : state) benchmark::DoNotOptimize(ed_greedy(m, state.range(1)));
}
BENCHMARK(BM_EdGreedy)->Args({300, 50})->Args({2000, 100})->Unit(benchmark::kMillisecond);

void BM_TetrachoricMatrix(benchmark::State& state) {
  const ScoreMatrix m = irt(300, state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(tetrachoric_matrix(m));
}
BENCHMARK(BM_TetrachoricMatrix)->Arg(30)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PermutationNull(benchmark::State& state) {
  const ScoreMatrix m = irt(300, 100, 5);
  for (auto _ : state) benchmark::DoNotOptimize(permutation_null(m, static_cast<std::size_t>(state.range(0)), 1));
}
BENCHMARK(BM_PermutationNull)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
