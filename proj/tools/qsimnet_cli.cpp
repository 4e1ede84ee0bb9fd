// Command line front end: experiment series sweeps, the entangled-pair
// conditional demo (in-process loopback or across two processes over TCP),
// and dB <-> damping-factor conversion.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsimnet/harness.hpp"
#include "qsimnet/linalg.hpp"

namespace {

using namespace qsimnet;

std::uint64_t default_seed_from_env() {
  // QENT_SEED overrides the built-in default; an explicit --seed wins.
  if (const char* env = std::getenv("QENT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError("QENT_SEED must be an unsigned integer, got '" +
                            std::string(env) + "'");
    }
  }
  return kDefaultSeed;
}

int run_series_command(const std::string& series, double eta_step,
                       const std::vector<double>& eve_rates,
                       std::size_t trials, std::size_t qubits,
                       std::uint64_t seed, const std::string& out_path,
                       const std::string& summary_path) {
  SeriesConfig cfg = SeriesConfig::defaults(series_from_name(series));
  cfg.eta_values = default_eta_grid(eta_step);
  if (!eve_rates.empty()) cfg.eve_rates = eve_rates;
  cfg.trials_per_point = trials;
  cfg.qubits_per_trial = qubits;
  cfg.master_seed = seed;
  cfg.validate();

  const std::vector<TrialRow> rows = run_series(cfg);

  std::ofstream raw(out_path, std::ios::binary);
  if (!raw) {
    std::cerr << "cannot open " << out_path << " for writing\n";
    return 1;
  }
  write_raw_csv(raw, rows);

  const std::vector<SummaryRow> summary = summarize(rows);
  std::ofstream sum(summary_path, std::ios::binary);
  if (!sum) {
    std::cerr << "cannot open " << summary_path << " for writing\n";
    return 1;
  }
  write_summary_csv(sum, summary);

  std::cout << "series " << series_name(cfg.series) << ": " << rows.size()
            << " trials -> " << out_path << ", " << summary.size()
            << " summary rows -> " << summary_path << "\n";
  return 0;
}

Mat2 gate_by_name(const std::string& name, double theta) {
  if (name == "ry") return gates::ry(theta);
  if (name == "sx") return gates::sigma_x();
  if (name == "sz") return gates::sigma_z();
  if (name == "h") return gates::hadamard();
  if (name == "id") return gates::identity();
  throw ValidationError("unknown gate '" + name +
                        "' (expected ry, sx, sz, h or id)");
}

void print_conditional(const ConditionalStats& stats) {
  std::cout << "trials            " << stats.trials << "\n";
  std::cout << "P(P=0)            " << format_double(stats.p_p0()) << " ("
            << stats.accepted << " accepted)\n";
  if (stats.accepted == 0) {
    std::cout << "P(Q=0 | P=0)      undefined (no P=0 events)\n";
    return;
  }
  std::cout << "P(Q=0 | P=0)      " << format_double(stats.p_q0_given_p0())
            << " (" << stats.q_zero << " of " << stats.accepted << ")\n";
}

int run_demo_loopback(const Mat2& gate, std::uint64_t trials,
                      std::uint64_t seed) {
  SimNode alice("alice", RandomSource::derive(seed, 1));
  SimNode bob("bob", RandomSource::derive(seed, 2));
  DemoReturner returner(bob);

  auto [stream_a, stream_b] = loopback_transport();
  std::shared_ptr<Session> bob_session;
  std::thread acceptor([&] { bob_session = bob.accept(stream_b); });
  auto alice_session = alice.connect(stream_a);
  acceptor.join();

  const ConditionalStats stats = conditional_demo_driver(
      alice, *alice_session, gate, trials, RandomSource::derive(seed, 3));
  print_conditional(stats);
  alice_session->close();
  bob_session->close();
  return 0;
}

int run_demo_connect(const std::string& endpoint, const Mat2& gate,
                     std::uint64_t trials, std::uint64_t seed) {
  const auto [host, port] = parse_host_port(endpoint);
  SimNode alice("alice", RandomSource::derive(seed, 1));
  auto session = alice.connect(tcp_connect(host, port));
  const ConditionalStats stats = conditional_demo_driver(
      alice, *session, gate, trials, RandomSource::derive(seed, 3));
  print_conditional(stats);
  session->close();
  return 0;
}

int run_demo_listen(const std::string& endpoint, std::uint64_t seed) {
  const auto [host, port] = parse_host_port(endpoint);
  SimNode bob("bob", RandomSource::derive(seed, 2));
  DemoReturner returner(bob);
  TcpListener listener(host, port);
  std::cout << "listening on " << (host.empty() ? "127.0.0.1" : host) << ":"
            << listener.port() << "\n";
  auto session = bob.accept(listener.accept());
  std::cout << "session with '" << session->peer_name() << "' established\n";
  // Serve until the driver hangs up.
  while (!session->closed()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  std::cout << "driver disconnected\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed qubit-pair simulation toolkit"};
  app.require_subcommand(1);

  // --- series ---------------------------------------------------------------
  std::string series = "control";
  double eta_step = 0.05;
  std::vector<double> eve_rates;
  std::size_t trials = 100;
  std::size_t qubits = 1000;
  std::uint64_t seed = 0;
  std::string out_path = "raw.csv";
  std::string summary_path = "summary.csv";

  CLI::App* series_cmd =
      app.add_subcommand("series", "run one experiment series, emit CSV");
  series_cmd->add_option("--series", series,
                         "control, eve_alice or eve_bob");
  series_cmd->add_option("--eta-step", eta_step,
                         "damping grid step over [0,1]");
  series_cmd->add_option("--eve-rates", eve_rates,
                         "comma separated eavesdropping rates")
      ->delimiter(',');
  series_cmd->add_option("--trials", trials, "trials per grid point");
  series_cmd->add_option("--qubits", qubits, "qubits per trial");
  CLI::Option* series_seed = series_cmd->add_option("--seed", seed, "master seed");
  series_cmd->add_option("--out", out_path, "raw CSV path");
  series_cmd->add_option("--summary", summary_path, "summary CSV path");

  // --- demo-entangle ----------------------------------------------------------
  std::string gate_name = "ry";
  double theta = 0.0;
  std::uint64_t demo_trials = 100000;
  std::string listen_endpoint;
  std::string connect_endpoint;
  bool loopback = false;

  CLI::App* demo_cmd = app.add_subcommand(
      "demo-entangle",
      "entangled-pair conditional experiment: P(Q=0 | P=0) after a gate on P");
  CLI::Option* opt_listen =
      demo_cmd->add_option("--listen", listen_endpoint, "serve on HOST:PORT");
  CLI::Option* opt_connect = demo_cmd->add_option(
      "--connect", connect_endpoint, "drive against HOST:PORT");
  CLI::Option* opt_loopback = demo_cmd->add_flag(
      "--loopback", loopback, "run both nodes in-process over the loopback transport");
  opt_listen->excludes(opt_connect)->excludes(opt_loopback);
  opt_connect->excludes(opt_listen)->excludes(opt_loopback);
  opt_loopback->excludes(opt_listen)->excludes(opt_connect);
  demo_cmd->add_option("--gate", gate_name, "ry, sx, sz, h or id");
  demo_cmd->add_option("--theta", theta, "rotation angle for --gate ry");
  demo_cmd->add_option("--trials", demo_trials, "pair cycles to run");
  CLI::Option* demo_seed = demo_cmd->add_option("--seed", seed, "master seed");

  // --- convert-db -------------------------------------------------------------
  double eta_in = 0.0;
  double db_in = 0.0;
  CLI::App* convert_cmd =
      app.add_subcommand("convert-db", "convert damping factor <-> dB");
  CLI::Option* opt_eta =
      convert_cmd->add_option("--eta", eta_in, "damping factor in [0,1)");
  CLI::Option* opt_db = convert_cmd->add_option("--db", db_in, "attenuation in dB");
  opt_eta->excludes(opt_db);
  opt_db->excludes(opt_eta);

  CLI11_PARSE(app, argc, argv);

  try {
    if (series_cmd->parsed()) {
      if (!*series_seed) seed = default_seed_from_env();
      return run_series_command(series, eta_step, eve_rates, trials, qubits,
                                seed, out_path, summary_path);
    }
    if (demo_cmd->parsed()) {
      if (!*demo_seed) seed = default_seed_from_env();
      if (!*opt_listen && !*opt_connect && !*opt_loopback) {
        std::cerr << "demo-entangle needs one of --loopback, --listen or "
                     "--connect\n";
        return 1;
      }
      const Mat2 gate = gate_by_name(gate_name, theta);
      if (*opt_listen) return run_demo_listen(listen_endpoint, seed);
      if (*opt_connect)
        return run_demo_connect(connect_endpoint, gate, demo_trials, seed);
      return run_demo_loopback(gate, demo_trials, seed);
    }
    if (convert_cmd->parsed()) {
      if (*opt_eta) {
        std::cout << "eta " << format_double(eta_in) << " = "
                  << format_double(attenuation_db(eta_in)) << " dB\n";
      } else if (*opt_db) {
        std::cout << db_in << " dB = eta " << format_double(eta_of_db(db_in))
                  << "\n";
      } else {
        std::cerr << "convert-db needs --eta or --db\n";
        return 1;
      }
      return 0;
    }
  } catch (const qsimnet::SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
