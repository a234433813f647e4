// Serial reference kernels against their OpenMP versions, at ADMM-like shapes
// (n rows, r1 = 10 columns, noise rank 30).

#include "ssel/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using ssel::Index;
using ssel::Matrix;
using ssel::Vector;

Matrix random_matrix(Index rows, Index cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

template <bool Parallel>
void bm_cross_gram(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix a = random_matrix(n, 30, 1), b = random_matrix(n, 10, 2);
  for (auto _ : state) {
    Matrix g = Parallel ? ssel::kernels::cross_gram(a, b) : ssel::kernels::serial::cross_gram(a, b);
    benchmark::DoNotOptimize(g.data());
  }
}

template <bool Parallel>
void bm_sub_product(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix left = random_matrix(n, 30, 3), small = random_matrix(30, 10, 4);
  Matrix out = random_matrix(n, 10, 5);
  for (auto _ : state) {
    if (Parallel)
      ssel::kernels::sub_product(out, left, small);
    else
      ssel::kernels::serial::sub_product(out, left, small);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void bm_row_norms(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix m = random_matrix(n, 10, 6);
  for (auto _ : state) {
    Vector v = Parallel ? ssel::kernels::row_norms(m) : ssel::kernels::serial::row_norms(m);
    benchmark::DoNotOptimize(v.data());
  }
}

template <bool Parallel>
void bm_scale_rows(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix m = random_matrix(n, 10, 7);
  const Vector d = random_matrix(n, 1, 8).col(0);
  Matrix out(n, 10);
  for (auto _ : state) {
    if (Parallel)
      ssel::kernels::scale_rows(out, d, m);
    else
      ssel::kernels::serial::scale_rows(out, d, m);
    benchmark::DoNotOptimize(out.data());
  }
}

#define SSEL_BENCH_PAIR(fn)                                                          \
  BENCHMARK(fn<false>)->Name(#fn "/serial")->RangeMultiplier(4)->Range(1 << 10, 1 << 16); \
  BENCHMARK(fn<true>)->Name(#fn "/openmp")->RangeMultiplier(4)->Range(1 << 10, 1 << 16)

SSEL_BENCH_PAIR(bm_cross_gram);
SSEL_BENCH_PAIR(bm_sub_product);
SSEL_BENCH_PAIR(bm_row_norms);
SSEL_BENCH_PAIR(bm_scale_rows);

}  // namespace

BENCHMARK_MAIN();
