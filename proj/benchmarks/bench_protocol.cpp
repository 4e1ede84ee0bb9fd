#include <benchmark/benchmark.h>

#include "qsimnet/bb84.hpp"
#include "qsimnet/entangle.hpp"
#include "qsimnet/noise.hpp"

using namespace qsimnet;

static void BM_PairLifecycle(benchmark::State& state) {
  RandomSource rng(1);
  const EprMatrix epr{bell::phi_plus()};
  std::uint64_t id = 0;
  for (auto _ : state) {
    EntangledPair p = create_entangled_pair(epr, id + 1, id + 2, id + 3);
    id += 3;
    p.side_a->apply_gate(gates::ry(0.5), 0);
    benchmark::DoNotOptimize(p.side_a->measure_entangled(0, rng));
  }
}
BENCHMARK(BM_PairLifecycle);

static void BM_Bb84Run(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) {
    Bb84Config cfg;
    cfg.n = static_cast<std::size_t>(state.range(0));
    cfg.seed = seed++;
    cfg.pipeline = eve_near_bob_pipeline(0.5, 0.5);
    benchmark::DoNotOptimize(run_bb84(cfg));
  }
}
BENCHMARK(BM_Bb84Run)->Arg(1000);

static void BM_Damp(benchmark::State& state) {
  RandomSource rng(1);
  for (auto _ : state) {
    QuantumRegister reg(1, 1024);
    for (std::size_t i = 0; i < reg.size(); ++i) {
      reg.at(i).state = {{0.6, 0}, {0, 0.8}};
    }
    damp(reg, 0.5, rng);
    benchmark::DoNotOptimize(reg);
  }
}
BENCHMARK(BM_Damp);
