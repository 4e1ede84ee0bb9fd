#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qsimnet/bb84.hpp"
#include "qsimnet/node.hpp"

namespace qsimnet {

inline constexpr std::uint64_t kDefaultSeed = 1729;

/// Shortest decimal form that round-trips the double exactly.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// dB <-> damping-factor conversions
// ---------------------------------------------------------------------------

/// -10 log10(1 - eta). Requires 0 <= eta < 1 (eta = 1 is infinitely
/// attenuating and raises ValidationError).
double attenuation_db(double eta);

/// 1 - 10^(-db/10). Requires db >= 0. Mutually inverse with attenuation_db
/// within 1e-12.
double eta_of_db(double db);

/// -10 log10(received/sent) from run counts; +infinity when nothing arrived.
double measured_attenuation_db(std::uint64_t received, std::uint64_t sent);

// ---------------------------------------------------------------------------
// Experiment series
// ---------------------------------------------------------------------------

enum class SeriesKind : std::uint8_t { control, eve_alice, eve_bob };

const char* series_name(SeriesKind kind);
SeriesKind series_from_name(const std::string& name);  // ValidationError

struct SeriesConfig {
  SeriesKind series = SeriesKind::control;
  std::vector<double> eta_values;  // default 0.00 .. 1.00 step 0.05
  std::vector<double> eve_rates;   // default {.1,.2,.3,.4,.5,1.0}; empty for control
  std::size_t trials_per_point = 100;
  std::size_t qubits_per_trial = 1000;
  std::uint64_t master_seed = kDefaultSeed;

  static SeriesConfig defaults(SeriesKind kind);
  void validate() const;  // throws ValidationError
};

std::vector<double> default_eta_grid(double step = 0.05);

struct TrialRow {
  SeriesKind series = SeriesKind::control;
  double eta = 0.0;
  double eve_rate = 0.0;
  std::uint64_t trial_index = 0;
  std::uint64_t seed = 0;
  RunStats stats;
};

/// One row per trial, in deterministic (eve_rate, eta, trial) order.
/// Pipeline order per series: control = [damp], eve_alice = [eavesdrop,
/// damp], eve_bob = [damp, eavesdrop].
std::vector<TrialRow> run_series(const SeriesConfig& cfg);

/// Raw CSV with columns: series, eta, eve_rate, trial_index, seed, sent,
/// received, sifted, matched, efficiency, sifted_error_rate, attenuation_db.
void write_raw_csv(std::ostream& out, const std::vector<TrialRow>& rows);
std::string raw_csv(const std::vector<TrialRow>& rows);

struct SummaryRow {
  SeriesKind series = SeriesKind::control;
  double eve_rate = 0.0;
  double eta = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// Least-squares fit of mean efficiency vs eta for this (series, eve_rate)
  /// curve: coefficients c0 + c1*eta + c2*eta^2. Two points fall back to the
  /// exact line (c2 = 0); one point to the constant.
  std::array<double, 3> fit{};
};

/// Per (series, eve_rate, eta) statistics of efficiency over trials, plus
/// the per-curve quadratic fit. Throws ValidationError on empty input.
std::vector<SummaryRow> summarize(const std::vector<TrialRow>& rows);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::string summary_csv(const std::vector<SummaryRow>& rows);

// ---------------------------------------------------------------------------
// Entangled-pair conditional demo (the rotate-P-then-measure experiment)
// ---------------------------------------------------------------------------

struct ConditionalStats {
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;  // trials where P measured 0
  std::uint64_t q_zero = 0;    // accepted trials where Q then measured 0
  double p_q0_given_p0() const;
  double p_p0() const;
};

/// Runs `trials` pair cycles in-process with no transport: create a phi+
/// pair, apply `gate` to half P, measure P (reconciling Q through the
/// asynchronous protocol), then measure Q. Conditions on P = 0.
ConditionalStats conditional_demo_local(const Mat2& gate, std::uint64_t trials,
                                        std::uint64_t seed);

/// Driver half of the same experiment over an established session: half Q is
/// shipped to the peer, the gate and measurement happen locally, the peer
/// reconciles and ships Q back (see DemoReturner), and Q is measured here.
ConditionalStats conditional_demo_driver(SimNode& node, Session& session,
                                         const Mat2& gate,
                                         std::uint64_t trials,
                                         std::uint64_t seed);

/// Listener-side behavior for the demo: ships every register touched by a
/// reconciliation back to the peer it came from, from a worker thread.
class DemoReturner {
 public:
  explicit DemoReturner(SimNode& node);
  ~DemoReturner();
  DemoReturner(const DemoReturner&) = delete;
  DemoReturner& operator=(const DemoReturner&) = delete;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qsimnet
