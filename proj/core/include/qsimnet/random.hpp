#pragma once

#include <cstdint>
#include <random>

namespace qsimnet {

/// Deterministic pseudo-random stream of reals in [0,1).
///
/// Identical seeds produce identical streams on every platform: mt19937_64 is
/// fully specified by the standard and the [0,1) mapping below avoids the
/// implementation-defined std::uniform_real_distribution.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  /// Uniform double in [0,1) with 53 random bits.
  double next_real() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform bit.
  int next_bit() { return next_real() < 0.5 ? 0 : 1; }

  /// Uniform index in [0, n).
  std::size_t next_index(std::size_t n) {
    if (n == 0) return 0;
    auto idx = static_cast<std::size_t>(next_real() * static_cast<double>(n));
    return idx >= n ? n - 1 : idx;
  }

  std::uint64_t next_u64() { return engine_(); }

  std::uint64_t seed() const { return seed_; }

  /// Derive an independent child seed from a master seed and a stream index
  /// (splitmix64 over the pair). Used to give every trial its own stream.
  static std::uint64_t derive(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t x = master + 0x9E3779B97F4A7C15ull * (stream + 1);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace qsimnet
