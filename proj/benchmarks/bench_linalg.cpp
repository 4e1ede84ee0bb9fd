#include <benchmark/benchmark.h>

#include "qsimnet/linalg.hpp"
#include "qsimnet/random.hpp"

using namespace qsimnet;

static void BM_ApplyGate2(benchmark::State& state) {
  const Mat2 g = gates::ry(0.7);
  AmplitudePair s{{0.6, 0}, {0, 0.8}};
  for (auto _ : state) {
    s = apply(g, s);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_ApplyGate2);

static void BM_Apply4(benchmark::State& state) {
  const Mat4 m = tensor_right(gates::ry(0.7)) * tensor_left(gates::hadamard());
  Vec4 v{{0.5, 0}, {0.5, 0}, {0.5, 0}, {0.5, 0}};
  for (auto _ : state) {
    v = apply4(m, v);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_Apply4);

static void BM_MakeGate(benchmark::State& state) {
  RandomSource rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gates::ry(rng.next_real()));
  }
}
BENCHMARK(BM_MakeGate);

static void BM_OperatorSum(benchmark::State& state) {
  const KrausPair k = make_amplitude_damping_kraus(0.5);
  const DensityMatrix rho = pure_density({{0.6, 0}, {0, 0.8}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_operator_sum(rho, k));
  }
}
BENCHMARK(BM_OperatorSum);
