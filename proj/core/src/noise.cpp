#include "qsimnet/noise.hpp"

#include <cmath>

#include "qsimnet/errors.hpp"

namespace qsimnet {

namespace {

void check_rate(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ValidationError(std::string(what) + " must lie in [0,1], got " +
                          std::to_string(value));
  }
}

}  // namespace

void eavesdrop(QuantumRegister& reg, double rate, RandomSource& rng,
               EavesdropTally* tally) {
  check_rate(rate, "eavesdropping rate");
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (rng.next_real() >= rate) continue;
    Qubit& q = reg.at(i);
    int bit;
    if (q.lost) {
      // No defined outcome on a lost qubit: record a coin flip, resend fresh.
      bit = rng.next_bit();
      q.lost = false;
      if (tally) ++tally->refreshed;
    } else {
      bit = reg.measure(i, rng);
      if (tally) ++tally->measured;
    }
    q.state = bit == 0 ? AmplitudePair{{1.0, 0.0}, {0.0, 0.0}}
                       : AmplitudePair{{0.0, 0.0}, {1.0, 0.0}};
    if (tally) {
      ++tally->intercepted;
      if (bit == 1) ++tally->ones;
    }
  }
}

void damp(QuantumRegister& reg, double eta, RandomSource& rng) {
  check_rate(eta, "damping factor eta");
  const double survivor_scale = std::sqrt(1.0 - eta);
  for (std::size_t i = 0; i < reg.size(); ++i) {
    Qubit& q = reg.at(i);
    if (q.lost) continue;
    const double p_decay = eta * std::norm(q.state.beta);
    if (rng.next_real() < p_decay) {
      q.lost = true;
      q.state = {{1.0, 0.0}, {0.0, 0.0}};  // decay image; ignored while lost
      continue;
    }
    AmplitudePair damped{q.state.alpha, survivor_scale * q.state.beta};
    q.state = normalized(damped);
  }
}

InterceptResendEavesdropper::InterceptResendEavesdropper(double rate)
    : rate_(rate) {
  check_rate(rate, "eavesdropping rate");
}

AmplitudeDampingChannel::AmplitudeDampingChannel(double eta) : eta_(eta) {
  check_rate(eta, "damping factor eta");
}

std::string ChannelPipeline::describe() const {
  std::string out;
  for (const auto& stage : stages_) {
    if (!out.empty()) out += ",";
    out += stage->name();
  }
  return out;
}

ChannelPipeline control_pipeline(double eta) {
  ChannelPipeline p;
  p.add(std::make_shared<AmplitudeDampingChannel>(eta));
  return p;
}

ChannelPipeline eve_near_alice_pipeline(double rate, double eta) {
  ChannelPipeline p;
  p.add(std::make_shared<InterceptResendEavesdropper>(rate));
  p.add(std::make_shared<AmplitudeDampingChannel>(eta));
  return p;
}

ChannelPipeline eve_near_bob_pipeline(double rate, double eta) {
  ChannelPipeline p;
  p.add(std::make_shared<AmplitudeDampingChannel>(eta));
  p.add(std::make_shared<InterceptResendEavesdropper>(rate));
  return p;
}

}  // namespace qsimnet
