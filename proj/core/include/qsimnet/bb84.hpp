#pragma once

#include <cstdint>
#include <vector>

#include "qsimnet/noise.hpp"
#include "qsimnet/register.hpp"

namespace qsimnet {

enum class Basis : std::uint8_t { rectilinear, diagonal };

struct Bb84Config {
  std::size_t n = 1000;  // qubits per run, >= 1
  std::vector<Basis> basis_set{Basis::rectilinear, Basis::diagonal};
  ChannelPipeline pipeline;
  std::uint64_t seed = 0;
};

struct AlicePreparation {
  std::vector<int> bits;
  std::vector<Basis> bases;
  QuantumRegister reg;
};

struct BobMeasurement {
  std::vector<Basis> bases;
  std::vector<int> bits;      // meaningful only where erasures[i] is false
  std::vector<bool> erasures; // lost qubits produce no bit
};

struct RunStats {
  std::uint64_t sent = 0;
  std::uint64_t received = 0;    // non-erased qubits at Bob
  std::uint64_t lost_at_bob = 0; // erasures
  std::uint64_t sifted = 0;
  std::uint64_t matched = 0;
  double efficiency = 0.0;         // matched / sent
  double sifted_error_rate = 0.0;  // 1 - matched/sifted (0 when sifted == 0)
  double attenuation_db = 0.0;     // -10 log10(received/sent)
};

/// Uniform random bits and bases; each qubit starts at |0>, gets sigma-x
/// when the bit is 1, then Hadamard when the basis is diagonal.
AlicePreparation alice_prepare(const Bb84Config& cfg, RandomSource& rng);

/// Uniform random basis per qubit; a diagonal measurement applies Hadamard
/// first. Lost qubits are recorded as erasures and produce no bit.
BobMeasurement bob_measure(QuantumRegister& reg, RandomSource& rng,
                           const std::vector<Basis>& basis_set);

/// Positions where the bases match and no erasure occurred. Throws
/// ValidationError on a length mismatch.
std::vector<std::size_t> sift(const std::vector<Basis>& alice_bases,
                              const std::vector<Basis>& bob_bases,
                              const std::vector<bool>& erasures);

/// Full run: prepare, channel noise, Bob's measurement, sifting, and bit
/// comparison at the sifted positions (the simulation has oracle access to
/// both sides; basis comparison is not modeled as a classical channel).
RunStats run_bb84(const Bb84Config& cfg);

}  // namespace qsimnet
