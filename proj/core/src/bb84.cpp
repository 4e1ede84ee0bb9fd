#include "qsimnet/bb84.hpp"

#include <cmath>

#include "qsimnet/errors.hpp"
#include "qsimnet/harness.hpp"

namespace qsimnet {

AlicePreparation alice_prepare(const Bb84Config& cfg, RandomSource& rng) {
  if (cfg.n < 1) {
    throw ValidationError("qubits per run must be >= 1");
  }
  if (cfg.basis_set.empty()) {
    throw ValidationError("basis set must not be empty");
  }
  AlicePreparation out;
  out.bits.reserve(cfg.n);
  out.bases.reserve(cfg.n);
  out.reg = QuantumRegister(0, cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const int bit = rng.next_bit();
    const Basis basis = cfg.basis_set[rng.next_index(cfg.basis_set.size())];
    out.bits.push_back(bit);
    out.bases.push_back(basis);
    if (bit == 1) out.reg.apply_gate(gates::sigma_x(), i);
    if (basis == Basis::diagonal) out.reg.apply_gate(gates::hadamard(), i);
  }
  return out;
}

BobMeasurement bob_measure(QuantumRegister& reg, RandomSource& rng,
                           const std::vector<Basis>& basis_set) {
  if (basis_set.empty()) {
    throw ValidationError("basis set must not be empty");
  }
  BobMeasurement out;
  out.bases.reserve(reg.size());
  out.bits.resize(reg.size(), 0);
  out.erasures.resize(reg.size(), false);
  for (std::size_t i = 0; i < reg.size(); ++i) {
    const Basis basis = basis_set[rng.next_index(basis_set.size())];
    out.bases.push_back(basis);
    if (reg.at(i).lost) {
      out.erasures[i] = true;  // lost => erasure, no key bit
      continue;
    }
    if (basis == Basis::diagonal) reg.apply_gate(gates::hadamard(), i);
    out.bits[i] = reg.measure(i, rng);
  }
  return out;
}

std::vector<std::size_t> sift(const std::vector<Basis>& alice_bases,
                              const std::vector<Basis>& bob_bases,
                              const std::vector<bool>& erasures) {
  if (alice_bases.size() != bob_bases.size() ||
      alice_bases.size() != erasures.size()) {
    throw ValidationError("sift inputs must have equal lengths");
  }
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < alice_bases.size(); ++i) {
    if (!erasures[i] && alice_bases[i] == bob_bases[i]) positions.push_back(i);
  }
  return positions;
}

RunStats run_bb84(const Bb84Config& cfg) {
  RandomSource rng(cfg.seed);
  AlicePreparation alice = alice_prepare(cfg, rng);
  cfg.pipeline.apply(alice.reg, rng);
  BobMeasurement bob = bob_measure(alice.reg, rng, cfg.basis_set);
  const std::vector<std::size_t> positions =
      sift(alice.bases, bob.bases, bob.erasures);

  RunStats stats;
  stats.sent = cfg.n;
  for (bool erased : bob.erasures) {
    if (erased) ++stats.lost_at_bob;
  }
  stats.received = stats.sent - stats.lost_at_bob;
  stats.sifted = positions.size();
  for (std::size_t pos : positions) {
    if (alice.bits[pos] == bob.bits[pos]) ++stats.matched;
  }
  stats.efficiency =
      static_cast<double>(stats.matched) / static_cast<double>(stats.sent);
  stats.sifted_error_rate =
      stats.sifted == 0
          ? 0.0
          : 1.0 - static_cast<double>(stats.matched) /
                      static_cast<double>(stats.sifted);
  stats.attenuation_db = measured_attenuation_db(stats.received, stats.sent);
  return stats;
}

}  // namespace qsimnet
