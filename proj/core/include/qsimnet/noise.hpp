#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qsimnet/register.hpp"

namespace qsimnet {

struct EavesdropTally {
  std::uint64_t intercepted = 0;  // qubits selected at the configured rate
  std::uint64_t measured = 0;     // non-lost interceptions (real measurement)
  std::uint64_t refreshed = 0;    // lost interceptions replaced with a fresh qubit
  std::uint64_t ones = 0;         // bits recorded as 1
};

/// Intercept-resend pass over a register. Each qubit is independently
/// selected with probability `rate`; a selected non-lost qubit is measured in
/// the rectilinear basis and resent as the matching computational-basis
/// state; a selected lost qubit has no defined outcome, so the eavesdropper
/// records a uniform random bit and resends a fresh (non-lost) qubit set to
/// it. Register length never changes.
void eavesdrop(QuantumRegister& reg, double rate, RandomSource& rng,
               EavesdropTally* tally = nullptr);

/// Per-qubit trajectory sampling of the amplitude-damping operator sum with
/// damping factor eta: with probability eta*|beta|^2 the decay branch is
/// taken and the lost flag set; otherwise the state becomes
/// (alpha, sqrt(1-eta)*beta), renormalized. Already-lost qubits pass through
/// lost.
void damp(QuantumRegister& reg, double eta, RandomSource& rng);

/// A channel-noise pass. Applying a stage never changes register length:
/// lost qubits remain as slots with the lost flag set.
class NoiseStage {
 public:
  virtual ~NoiseStage() = default;
  virtual void apply(QuantumRegister& reg, RandomSource& rng) = 0;
  virtual std::string_view name() const = 0;
};

class InterceptResendEavesdropper : public NoiseStage {
 public:
  explicit InterceptResendEavesdropper(double rate = 0.05);

  void apply(QuantumRegister& reg, RandomSource& rng) override {
    eavesdrop(reg, rate_, rng, &tally_);
  }
  std::string_view name() const override { return "eavesdrop"; }

  double rate() const { return rate_; }
  const EavesdropTally& tally() const { return tally_; }

 private:
  double rate_;
  EavesdropTally tally_;
};

class AmplitudeDampingChannel : public NoiseStage {
 public:
  explicit AmplitudeDampingChannel(double eta);

  void apply(QuantumRegister& reg, RandomSource& rng) override {
    damp(reg, eta_, rng);
  }
  std::string_view name() const override { return "damp"; }

  double eta() const { return eta_; }

 private:
  double eta_;
};

/// Ordered list of noise stages, applied strictly in listed order.
class ChannelPipeline {
 public:
  ChannelPipeline() = default;
  explicit ChannelPipeline(std::vector<std::shared_ptr<NoiseStage>> stages)
      : stages_(std::move(stages)) {}

  void add(std::shared_ptr<NoiseStage> stage) {
    stages_.push_back(std::move(stage));
  }

  void apply(QuantumRegister& reg, RandomSource& rng) const {
    for (const auto& stage : stages_) stage->apply(reg, rng);
  }

  const std::vector<std::shared_ptr<NoiseStage>>& stages() const {
    return stages_;
  }
  bool empty() const { return stages_.empty(); }

  /// Comma-joined stage names, for experiment output.
  std::string describe() const;

 private:
  std::vector<std::shared_ptr<NoiseStage>> stages_;
};

/// Damping only.
ChannelPipeline control_pipeline(double eta);
/// Eavesdropper near the sender: intercept first, then damping.
ChannelPipeline eve_near_alice_pipeline(double rate, double eta);
/// Eavesdropper near the receiver: damping first, then intercept.
ChannelPipeline eve_near_bob_pipeline(double rate, double eta);

}  // namespace qsimnet
