// Acceptance suite. Every criterion prints one [PASS]/[FAIL] line plus the
// measured values behind it; the process exits nonzero when any requested
// criterion fails. Run a single criterion with --criterion N or everything
// with --all.
//
// Criteria 1, 2, 5 and 7 contain sub-checks whose target values are not
// reachable under this simulator's reconciliation and trajectory-damping
// models; those checks run faithfully against their stated targets, fail,
// and print the measured quantity alongside the model-level explanation.
// The README's "model notes" section and the test output below document
// each divergence.

#include <cmath>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qsimnet/harness.hpp"
#include "qsimnet/node.hpp"

using namespace qsimnet;

namespace {

constexpr std::uint64_t kAcceptSeed = 20250811;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

struct Check {
  std::string label;
  bool pass = false;
  std::string detail;
};

std::vector<Check> g_checks;

void record(std::string label, bool pass, std::string detail = "") {
  g_checks.push_back({std::move(label), pass, std::move(detail)});
}

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------------------
// Criterion 1: conditional-probability table at seven rotation angles.

void criterion_1() {
  const double thetas[] = {0.0,      M_PI / 12, M_PI / 6, M_PI / 4,
                           M_PI / 3, 5 * M_PI / 12, M_PI / 2};
  const double targets[] = {1.0, 0.933, 0.75, 0.5, 0.25, 0.067, 0.0};
  const char* names[] = {"0",    "pi/12", "pi/6", "pi/4",
                         "pi/3", "5pi/12", "pi/2"};
  const std::uint64_t trials = 100000;
  for (int i = 0; i < 7; ++i) {
    const ConditionalStats stats = conditional_demo_local(
        gates::ry(thetas[i]), trials, RandomSource::derive(kAcceptSeed, 100 + i));
    std::ostringstream detail;
    if (stats.accepted == 0) {
      detail << "no P=0 events in " << trials
             << " trials: the protocol's local marginal P(P=0) = "
                "(1 - sin 2theta)/2 vanishes at theta = pi/4, so the "
                "conditional is undefined; target "
             << fmt(targets[i]);
      record(std::string("theta = ") + names[i], false, detail.str());
      continue;
    }
    const double observed = stats.p_q0_given_p0();
    const bool pass = std::abs(observed - targets[i]) <= 0.01;
    detail << "P(Q=0 | P=0) = " << fmt(observed) << " over " << stats.accepted
           << " accepted trials, target " << fmt(targets[i]) << " +/- 0.01";
    record(std::string("theta = ") + names[i], pass, detail.str());
  }
}

// ---------------------------------------------------------------------------
// Criterion 2: reconciliation vs the joint-state (linear extension) oracle.

AmplitudePair oracle_conditional(const Mat4& op, const Vec4& start,
                                 int outcome) {
  const Vec4 joint = apply4(op, start);
  const AmplitudePair raw = outcome == 0 ? AmplitudePair{joint.a00, joint.a01}
                                         : AmplitudePair{joint.a10, joint.a11};
  return normalized(raw);
}

void check_reconcile_example(const std::string& label, const OpHistory& own,
                             const OpHistory& measurer, int outcome,
                             const Mat4& oracle_op) {
  EntangledPair p = create_entangled_pair(EprMatrix(bell::phi_plus()), 1, 2, 3);
  for (const Mat2& g : own) p.side_b->apply_gate(g, 0);
  MeasurementNotice notice{1, Side::A, outcome, measurer};
  p.side_b->reconcile(notice);
  const AmplitudePair async = p.side_b->base().at(0).state;
  const AmplitudePair oracle =
      oracle_conditional(oracle_op, bell::phi_plus(), outcome);

  const bool amplitudes_match = equal_up_to_phase(async, oracle, 1e-9);
  const bool distributions_match =
      std::abs(std::norm(async.alpha) - std::norm(oracle.alpha)) <= 1e-9;
  const Complex overlap = std::conj(async.alpha) * oracle.alpha +
                          std::conj(async.beta) * oracle.beta;
  std::ostringstream detail;
  detail << "async (" << fmt(async.alpha.real()) << ", "
         << fmt(async.beta.real()) << "), oracle ("
         << fmt(oracle.alpha.real()) << ", " << fmt(oracle.beta.real())
         << "), fidelity " << fmt(std::abs(overlap))
         << (distributions_match ? "; measurement distributions agree exactly"
                                 : "; DISTRIBUTIONS DIFFER");
  if (!amplitudes_match && distributions_match) {
    detail << " (replaying the measurer's history reproduces the oracle's "
              "probabilities for any gate, and its amplitudes only for "
              "transpose-symmetric histories)";
  }
  record(label, amplitudes_match, detail.str());
}

void criterion_2() {
  check_reconcile_example("sigma-x on the measurer, outcome 1", {},
                          {gates::sigma_x()}, 1,
                          tensor_right(gates::sigma_x()));
  check_reconcile_example(
      "sigma-x on the measurer + rotation pi/3 on the partner, outcome 1",
      {gates::ry(M_PI / 3)}, {gates::sigma_x()}, 1,
      tensor_left(gates::ry(M_PI / 3)) * tensor_right(gates::sigma_x()));
  const double thetas[] = {0.0,      M_PI / 12, M_PI / 6, M_PI / 4,
                           M_PI / 3, 5 * M_PI / 12, M_PI / 2};
  const char* names[] = {"0",    "pi/12", "pi/6", "pi/4",
                         "pi/3", "5pi/12", "pi/2"};
  for (int i = 0; i < 7; ++i) {
    check_reconcile_example(
        std::string("rotation theta = ") + names[i] + " on the measurer, outcome 0",
        {}, {gates::ry(thetas[i])}, 0, tensor_right(gates::ry(thetas[i])));
  }
}

// ---------------------------------------------------------------------------
// Criterion 3: distributed run equals the local run bit for bit.

struct ScenarioResult {
  std::vector<std::uint8_t> reg_a;
  std::vector<std::uint8_t> reg_b;
};

ScenarioResult scenario_local(std::uint64_t measure_seed) {
  EntangledPair pair =
      create_entangled_pair(EprMatrix(bell::phi_plus()), 1, 2, 3);
  pair.side_a->apply_gate(gates::sigma_x(), 0);
  pair.side_b->apply_gate(gates::ry(M_PI / 3), 0);
  RandomSource rng(measure_seed);
  pair.side_a->measure_entangled(0, rng);
  return {serialize(pair.side_a->base()), serialize(pair.side_b->base())};
}

ScenarioResult scenario_transported(std::shared_ptr<ByteStream> stream_a,
                                    std::shared_ptr<ByteStream> stream_b,
                                    std::uint64_t measure_seed) {
  SimNode alice("alice", 81);
  SimNode bob("bob", 82);
  std::shared_ptr<Session> bob_session;
  std::thread acceptor([&] { bob_session = bob.accept(stream_b); });
  auto alice_session = alice.connect(stream_a);
  acceptor.join();

  EntangledPair pair = alice.create_pair(EprMatrix(bell::phi_plus()));
  alice.send_register(*alice_session, pair.side_b->id());
  auto remote = bob.wait_for_register(pair.side_b->id(),
                                      std::chrono::milliseconds(5000));
  if (!remote) throw TransportError("transfer did not arrive");

  pair.side_a->apply_gate(gates::sigma_x(), 0);
  remote->apply_gate(gates::ry(M_PI / 3), 0);
  RandomSource rng(measure_seed);
  pair.side_a->measure_entangled(0, rng);

  ScenarioResult out{serialize(pair.side_a->base()), serialize(remote->base())};
  alice_session->close();
  bob_session->close();
  return out;
}

void criterion_3() {
  const std::uint64_t seed = RandomSource::derive(kAcceptSeed, 300);

  const ScenarioResult local = scenario_local(seed);

  auto [la, lb] = loopback_transport();
  const ScenarioResult looped = scenario_transported(la, lb, seed);
  record("loopback run bit-identical to the local run",
         local.reg_a == looped.reg_a && local.reg_b == looped.reg_b,
         "serialized final registers compared byte for byte");

  TcpListener listener("127.0.0.1", 0);
  std::shared_ptr<ByteStream> server;
  std::thread acceptor([&] { server = listener.accept(); });
  auto client = tcp_connect("127.0.0.1", listener.port());
  acceptor.join();
  const ScenarioResult socketed = scenario_transported(client, server, seed);
  record("tcp socket run bit-identical to the local run",
         local.reg_a == socketed.reg_a && local.reg_b == socketed.reg_b,
         "same scenario over 127.0.0.1:" + std::to_string(listener.port()));
}

// ---------------------------------------------------------------------------
// Criterion 4: Kraus completeness and trajectory/operator-sum consistency.

void criterion_4() {
  bool complete = true;
  for (double eta : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    if (!is_complete(make_amplitude_damping_kraus(eta), 1e-12)) complete = false;
  }
  record("completeness E0^dag E0 + E1^dag E1 = I at eta in {0,.25,.5,.9,1}",
         complete, "tolerance 1e-12");

  const std::size_t n = 100000;
  RandomSource rng(RandomSource::derive(kAcceptSeed, 400));
  QuantumRegister reg(1, n);
  for (std::size_t i = 0; i < n; ++i) {
    reg.at(i).state = {{kInvSqrt2, 0}, {kInvSqrt2, 0}};
  }
  damp(reg, 0.5, rng);
  DensityMatrix ensemble{{0, 0}, {0, 0}, {0, 0}, {0, 0}};
  for (std::size_t i = 0; i < n; ++i) {
    const DensityMatrix c = reg.at(i).lost
                                ? pure_density({{1, 0}, {0, 0}})
                                : pure_density(reg.at(i).state);
    ensemble.r00 += c.r00 / static_cast<double>(n);
    ensemble.r01 += c.r01 / static_cast<double>(n);
    ensemble.r10 += c.r10 / static_cast<double>(n);
    ensemble.r11 += c.r11 / static_cast<double>(n);
  }
  const DensityMatrix oracle = apply_operator_sum(
      pure_density({{kInvSqrt2, 0}, {kInvSqrt2, 0}}),
      make_amplitude_damping_kraus(0.5));
  const double worst = std::max(
      std::max(std::abs(ensemble.r00 - oracle.r00),
               std::abs(ensemble.r01 - oracle.r01)),
      std::max(std::abs(ensemble.r10 - oracle.r10),
               std::abs(ensemble.r11 - oracle.r11)));
  record("trajectory ensemble matches the operator-sum oracle for |+>, eta=0.5",
         worst <= 0.01,
         "largest entrywise deviation " + fmt(worst) + " over " +
             std::to_string(n) + " trajectories (cap 0.01)");
}

// ---------------------------------------------------------------------------
// Criterion 5: control-series endpoints and monotone means.

std::vector<SummaryRow> control_summary(std::uint64_t seed) {
  SeriesConfig cfg = SeriesConfig::defaults(SeriesKind::control);
  cfg.master_seed = seed;
  return summarize(run_series(cfg));
}

void criterion_5() {
  const auto summary = control_summary(RandomSource::derive(kAcceptSeed, 500));
  const SummaryRow& first = summary.front();
  const SummaryRow& last = summary.back();

  record("mean efficiency at eta = 0 is 0.5 +/- 0.02",
         std::abs(first.mean - 0.5) <= 0.02, "measured " + fmt(first.mean));

  std::ostringstream detail;
  detail << "measured " << fmt(last.mean)
         << "; the eta*|beta|^2 trajectory rule never damps the |0> "
            "component, so ground-state qubits survive a fully damped "
            "channel and keep matching (analytic limit 3/16)";
  record("mean efficiency at eta = 1 equals exactly 0", last.mean == 0.0,
         detail.str());

  bool monotone = true;
  std::string violation;
  for (std::size_t i = 0; i + 1 < summary.size(); ++i) {
    const double se_i =
        summary[i].stddev / std::sqrt(100.0);
    const double se_j =
        summary[i + 1].stddev / std::sqrt(100.0);
    const double allowance = 3.0 * std::sqrt(se_i * se_i + se_j * se_j);
    if (summary[i + 1].mean > summary[i].mean + allowance) {
      monotone = false;
      violation = "increase at eta " + fmt(summary[i + 1].eta);
      break;
    }
  }
  record("means non-increasing in eta (3-sigma allowance)", monotone,
         monotone ? "21 grid points, 100 trials each" : violation);
}

// ---------------------------------------------------------------------------
// Criterion 6: measured dB from run counts vs the damping factor.

void criterion_6() {
  const double etas[] = {0.68, 0.9, 0.99};
  const double targets[] = {5.0, 10.0, 20.0};
  const std::size_t n = 100000;
  for (int i = 0; i < 3; ++i) {
    RandomSource rng(RandomSource::derive(kAcceptSeed, 640 + i));
    QuantumRegister reg(1, n);
    for (std::size_t q = 0; q < n; ++q) {
      reg.at(q).state = {{0, 0}, {1, 0}};  // full excitation: loss rate = eta
    }
    damp(reg, etas[i], rng);
    std::uint64_t received = 0;
    for (std::size_t q = 0; q < n; ++q) {
      if (!reg.at(q).lost) ++received;
    }
    const double measured = measured_attenuation_db(received, n);
    std::ostringstream detail;
    detail << "received " << received << " of " << n << " -> "
           << fmt(measured) << " dB, target " << fmt(targets[i])
           << " +/- 0.3";
    record("eta = " + fmt(etas[i]), std::abs(measured - targets[i]) <= 0.3,
           detail.str());
  }
}

// ---------------------------------------------------------------------------
// Criterion 7: the eavesdropper-near-receiver refresh anomaly at full damping.

void criterion_7() {
  SeriesConfig eve = SeriesConfig::defaults(SeriesKind::eve_bob);
  eve.eta_values = {1.0};
  eve.eve_rates = {1.0};
  eve.master_seed = RandomSource::derive(kAcceptSeed, 700);
  const auto eve_summary = summarize(run_series(eve));

  SeriesConfig ctrl = SeriesConfig::defaults(SeriesKind::control);
  ctrl.eta_values = {1.0};
  ctrl.master_seed = RandomSource::derive(kAcceptSeed, 701);
  const auto ctrl_summary = summarize(run_series(ctrl));

  const double eve_mean = eve_summary.front().mean;
  const double ctrl_mean = ctrl_summary.front().mean;
  const double eve_se = eve_summary.front().stddev / std::sqrt(100.0);
  const double ctrl_se = ctrl_summary.front().stddev / std::sqrt(100.0);

  std::ostringstream band;
  band << "measured mean efficiency " << fmt(eve_mean)
       << "; the refresh tree under eta*|beta|^2 damping gives 5/16 = "
          "0.3125 (intercepted ground-state qubits are read perfectly), "
          "0.0125 above the stated band";
  record("eve-near-receiver, rate 1.0, eta 1.0: mean efficiency in [0.15, 0.30]",
         eve_mean >= 0.15 && eve_mean <= 0.30, band.str());

  const double gap = eve_mean - ctrl_mean;
  const double sigma = std::sqrt(eve_se * eve_se + ctrl_se * ctrl_se);
  record("strictly above the control mean at 3 sigma", gap > 3.0 * sigma,
         "eve " + fmt(eve_mean) + " vs control " + fmt(ctrl_mean) +
             " (gap " + fmt(gap) + ", 3 sigma = " + fmt(3.0 * sigma) + ")");
}

// ---------------------------------------------------------------------------
// Criterion 8: eavesdropper-near-sender error signature and masking trend.

// Independent oracle: exact expectation of the sifted error rate for
// intercept-resend at `rate` on a lossless channel, by enumerating the
// (bit, basis, interception, resend, readout) outcome tree.
double intercept_resend_error_oracle(double rate) {
  double sifted = 0.0, errors = 0.0;
  for (int bit = 0; bit < 2; ++bit) {
    for (int abasis = 0; abasis < 2; ++abasis) {
      for (int bbasis = 0; bbasis < 2; ++bbasis) {
        const double w0 = 0.125;
        if (abasis != bbasis) continue;  // not sifted
        // untouched qubit: matching-basis readout is exact
        sifted += w0 * (1.0 - rate);
        for (int eve_bit = 0; eve_bit < 2; ++eve_bit) {
          const double p_eve =
              abasis == 0 ? (eve_bit == bit ? 1.0 : 0.0) : 0.5;
          if (p_eve == 0.0) continue;
          const double w1 = w0 * rate * p_eve;
          if (abasis == 0) {
            sifted += w1;  // rectilinear resend reads back exactly
            if (eve_bit != bit) errors += w1;
          } else {
            for (int bob_bit = 0; bob_bit < 2; ++bob_bit) {
              const double w2 = w1 * 0.5;  // diagonal readout of |eve_bit>
              sifted += w2;
              if (bob_bit != bit) errors += w2;
            }
          }
        }
      }
    }
  }
  return errors / sifted;
}

void criterion_8() {
  const std::size_t n = 100000;
  int idx = 0;
  for (double rate : {0.2, 0.5, 1.0}) {
    Bb84Config cfg;
    cfg.n = n;
    cfg.seed = RandomSource::derive(kAcceptSeed, 800 + idx++);
    cfg.pipeline = eve_near_alice_pipeline(rate, 0.0);
    const RunStats stats = run_bb84(cfg);
    const double expected = intercept_resend_error_oracle(rate);
    const double sigma = std::sqrt(expected * (1.0 - expected) /
                                   static_cast<double>(stats.sifted));
    std::ostringstream detail;
    detail << "sifted error rate " << fmt(stats.sifted_error_rate)
           << ", outcome-tree oracle " << fmt(expected) << " (= rate/4), 3 sigma = "
           << fmt(3.0 * sigma);
    record("rate " + fmt(rate) + " at eta = 0",
           std::abs(stats.sifted_error_rate - expected) <= 3.0 * sigma,
           detail.str());
  }

  // Masking trend: the efficiency gap versus control shrinks as eta grows.
  SeriesConfig eve = SeriesConfig::defaults(SeriesKind::eve_alice);
  eve.eve_rates = {0.5};
  eve.master_seed = RandomSource::derive(kAcceptSeed, 810);
  const auto eve_summary = summarize(run_series(eve));
  const auto ctrl_summary =
      control_summary(RandomSource::derive(kAcceptSeed, 811));

  std::vector<double> etas, gaps, gap_vars;
  for (std::size_t i = 0; i < eve_summary.size(); ++i) {
    etas.push_back(eve_summary[i].eta);
    gaps.push_back(ctrl_summary[i].mean - eve_summary[i].mean);
    const double se_e = eve_summary[i].stddev / std::sqrt(100.0);
    const double se_c = ctrl_summary[i].stddev / std::sqrt(100.0);
    gap_vars.push_back(se_e * se_e + se_c * se_c);
  }
  double x_mean = 0.0;
  for (double x : etas) x_mean += x;
  x_mean /= static_cast<double>(etas.size());
  double sxx = 0.0, sxy = 0.0, var_slope = 0.0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double dx = etas[i] - x_mean;
    sxx += dx * dx;
    sxy += dx * gaps[i];
    var_slope += dx * dx * gap_vars[i];
  }
  const double slope = sxy / sxx;
  const double slope_sigma = std::sqrt(var_slope) / sxx;
  record("efficiency gap vs control shrinks across the eta sweep (rate 0.5)",
         slope < 0.0 && std::abs(slope) > 3.0 * slope_sigma,
         "gap slope " + fmt(slope) + " per unit eta (3 sigma = " +
             fmt(3.0 * slope_sigma) + "); gap at eta 0 = " + fmt(gaps.front()) +
             ", at eta 1 = " + fmt(gaps.back()));
}

// ---------------------------------------------------------------------------
// Criterion 9: property suites.

void criterion_9() {
  // Codec round trip over randomized envelopes.
  {
    RandomSource rng(RandomSource::derive(kAcceptSeed, 900));
    bool ok = true;
    for (int i = 0; i < 10000 && ok; ++i) {
      Envelope env;
      env.session_id = SessionId{{rng.next_u64(), rng.next_u64()}};
      switch (rng.next_index(5)) {
        case 0:
          env.kind = MessageKind::hello;
          env.payload = HelloPayload{"n" + std::to_string(i)};
          break;
        case 1: {
          RegisterTransferPayload p;
          p.register_id = rng.next_u64();
          for (int q = 0; q < 3; ++q) {
            const double a = rng.next_real();
            p.qubits.push_back(Qubit{
                AmplitudePair{{std::sqrt(a), 0}, {0, std::sqrt(1 - a)}},
                rng.next_bit() == 1});
          }
          p.entanglements.push_back(
              EntanglementEntry{rng.next_u64(), 1, Side::B, bell::psi_plus()});
          env.kind = MessageKind::register_transfer;
          env.payload = std::move(p);
          break;
        }
        case 2: {
          MeasurementNoticePayload p;
          p.notice.pair_id = rng.next_u64();
          p.notice.measured_side = rng.next_bit() ? Side::B : Side::A;
          p.notice.outcome = rng.next_bit();
          p.notice.history = {gates::ry(rng.next_real() * 3.1),
                              gates::sigma_z()};
          env.kind = MessageKind::measurement_notice;
          env.payload = std::move(p);
          break;
        }
        case 3:
          env.kind = MessageKind::ack;
          env.payload = AckPayload{};
          break;
        default:
          env.kind = MessageKind::error;
          env.payload = ErrorPayload{"unknown_pair", "detail " + std::to_string(i)};
          break;
      }
      ok = decode(encode(env)) == env;
    }
    record("codec round trip, 10^4 randomized envelopes", ok, "");
  }

  // Rewind identity over random histories.
  {
    RandomSource rng(RandomSource::derive(kAcceptSeed, 901));
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
      const std::size_t len = 1 + rng.next_index(8);
      std::vector<Mat2> history;
      for (std::size_t k = 0; k < len; ++k) {
        const double x = rng.next_real() * 2 - 1;
        const double y = rng.next_real() * 2 - 1;
        const double z = rng.next_real() * 2 - 1;
        const double w = rng.next_real() * 2 - 1;
        const double nrm = std::sqrt(x * x + y * y + z * z + w * w);
        if (nrm < 1e-9) continue;
        history.push_back(make_gate(rng.next_real() * 6.28,
                                    Complex{x, y} / nrm, Complex{z, w} / nrm));
      }
      const double a = rng.next_real();
      AmplitudePair start{{std::sqrt(a), 0}, {0, std::sqrt(1 - a)}};
      AmplitudePair s = start;
      for (const Mat2& g : history) s = apply(g, s);
      for (auto it = history.rbegin(); it != history.rend(); ++it) {
        s = apply(inverse(*it), s);
      }
      ok = std::abs(s.alpha - start.alpha) < 1e-9 &&
           std::abs(s.beta - start.beta) < 1e-9;
    }
    record("rewind identity, 10^3 random histories of length <= 8", ok,
           "tolerance 1e-9");
  }

  // Unitarity and normalization closure.
  {
    RandomSource rng(RandomSource::derive(kAcceptSeed, 902));
    bool ok = true;
    Mat2 chain = gates::identity();
    QuantumRegister reg(1, 1);
    for (int i = 0; i < 100 && ok; ++i) {
      const double x = rng.next_real() * 2 - 1;
      const double y = rng.next_real() * 2 - 1;
      const double z = rng.next_real() * 2 - 1;
      const double w = rng.next_real() * 2 - 1;
      const double nrm = std::sqrt(x * x + y * y + z * z + w * w);
      if (nrm < 1e-9) continue;
      const Mat2 g = make_gate(rng.next_real() * 6.28, Complex{x, y} / nrm,
                               Complex{z, w} / nrm);
      chain = g * chain;
      reg.apply_gate(g, 0);
      ok = is_unitary(chain, 1e-12) &&
           std::abs(norm_squared(reg.at(0).state) - 1.0) < 1e-9 &&
           is_unitary(tensor_right(chain) * tensor_left(g), 1e-12);
    }
    record("unitarity and normalization closure over 100 chained gates", ok,
           "");
  }

  // Single-notice rule.
  {
    RandomSource rng(RandomSource::derive(kAcceptSeed, 903));
    bool ok = true;
    for (int i = 0; i < 50 && ok; ++i) {
      EntangledPair p =
          create_entangled_pair(EprMatrix(bell::phi_plus()), 1, 2, 3);
      const auto [outcome, notice] = p.side_a->measure_entangled(0, rng);
      bool threw = false;
      try {
        p.side_b->reconcile(notice);
      } catch (const StaleEntanglementError&) {
        threw = true;
      }
      bool threw2 = false;
      try {
        p.side_a->measure_entangled(0, rng);
      } catch (const StaleEntanglementError&) {
        threw2 = true;
      }
      ok = threw && threw2;
    }
    record("single-notice rule: duplicates rejected deterministically", ok, "");
  }

  // Determinism: byte-identical CSV under a fixed seed.
  {
    SeriesConfig cfg = SeriesConfig::defaults(SeriesKind::eve_bob);
    cfg.eta_values = {0.0, 0.5, 1.0};
    cfg.eve_rates = {0.5};
    cfg.trials_per_point = 5;
    cfg.qubits_per_trial = 200;
    cfg.master_seed = RandomSource::derive(kAcceptSeed, 904);
    const std::string a = raw_csv(run_series(cfg));
    const std::string b = raw_csv(run_series(cfg));
    record("byte-identical CSV under a fixed seed", a == b,
           std::to_string(a.size()) + " bytes compared");
  }
}

// ---------------------------------------------------------------------------

struct CriterionInfo {
  int id;
  const char* title;
  void (*run)();
};

const CriterionInfo kCriteria[] = {
    {1, "conditional-probability table at seven rotation angles", criterion_1},
    {2, "reconciliation amplitudes vs the joint-state oracle", criterion_2},
    {3, "distributed execution is bit-identical to local execution", criterion_3},
    {4, "Kraus completeness and trajectory/operator-sum consistency", criterion_4},
    {5, "control-series endpoints and monotone decline", criterion_5},
    {6, "measured attenuation matches the damping factor in dB", criterion_6},
    {7, "refresh anomaly with the eavesdropper near the receiver", criterion_7},
    {8, "eavesdropper-near-sender signature and masking trend", criterion_8},
    {9, "property suites: codec, rewind, closure, single-notice, determinism",
     criterion_9},
};

bool run_criterion(const CriterionInfo& info) {
  g_checks.clear();
  info.run();
  bool pass = true;
  for (const Check& c : g_checks) {
    if (!c.pass) pass = false;
  }
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << info.id << ": "
            << info.title << "\n";
  for (const Check& c : g_checks) {
    std::cout << "    " << (c.pass ? "[ok]  " : "[MISS]") << " " << c.label;
    if (!c.detail.empty()) std::cout << " -- " << c.detail;
    std::cout << "\n";
  }
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (arg == "--all") {
      only = 0;
    } else if (arg == "--help") {
      std::cout << "usage: qsimnet_acceptance [--criterion N | --all]\n";
      return 0;
    }
  }

  bool all_pass = true;
  for (const CriterionInfo& info : kCriteria) {
    if (only != 0 && info.id != only) continue;
    if (!run_criterion(info)) all_pass = false;
  }
  return all_pass ? 0 : 1;
}
