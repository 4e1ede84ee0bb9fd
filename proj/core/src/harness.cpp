#include "qsimnet/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "qsimnet/errors.hpp"

namespace qsimnet {

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// ---------------------------------------------------------------------------
// Conversions

double attenuation_db(double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw ValidationError(
        eta == 1.0 ? "eta = 1 is infinitely attenuating (received/sent = 0)"
                   : "eta must lie in [0,1), got " + std::to_string(eta));
  }
  const double db = -10.0 * std::log10(1.0 - eta);
  return db == 0.0 ? 0.0 : db;
}

double eta_of_db(double db) {
  if (!(db >= 0.0)) {
    throw ValidationError("attenuation in dB must be >= 0, got " +
                          std::to_string(db));
  }
  return 1.0 - std::pow(10.0, -db / 10.0);
}

double measured_attenuation_db(std::uint64_t received, std::uint64_t sent) {
  if (sent == 0) {
    throw ValidationError("measured attenuation needs sent > 0");
  }
  if (received == 0) {
    return std::numeric_limits<double>::infinity();
  }
  const double db = -10.0 * std::log10(static_cast<double>(received) /
                                       static_cast<double>(sent));
  return db == 0.0 ? 0.0 : db;  // avoid -0 for lossless runs
}

// ---------------------------------------------------------------------------
// Series

const char* series_name(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::control: return "control";
    case SeriesKind::eve_alice: return "eve_alice";
    case SeriesKind::eve_bob: return "eve_bob";
  }
  return "?";
}

SeriesKind series_from_name(const std::string& name) {
  if (name == "control") return SeriesKind::control;
  if (name == "eve_alice") return SeriesKind::eve_alice;
  if (name == "eve_bob") return SeriesKind::eve_bob;
  throw ValidationError("unknown series '" + name +
                        "' (expected control, eve_alice or eve_bob)");
}

std::vector<double> default_eta_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) {
    throw ValidationError("eta step must lie in (0,1]");
  }
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor(1.0 / step + 0.5));
  for (std::size_t i = 0; i <= count; ++i) {
    grid.push_back(std::min(1.0, static_cast<double>(i) * step));
  }
  return grid;
}

SeriesConfig SeriesConfig::defaults(SeriesKind kind) {
  SeriesConfig cfg;
  cfg.series = kind;
  cfg.eta_values = default_eta_grid();
  if (kind != SeriesKind::control) {
    cfg.eve_rates = {0.1, 0.2, 0.3, 0.4, 0.5, 1.0};
  }
  return cfg;
}

void SeriesConfig::validate() const {
  if (trials_per_point < 1) {
    throw ValidationError("trials per point must be >= 1");
  }
  if (qubits_per_trial < 1) {
    throw ValidationError("qubits per trial must be >= 1");
  }
  if (eta_values.empty()) {
    throw ValidationError("eta grid must not be empty");
  }
  for (double eta : eta_values) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw ValidationError("eta values must lie in [0,1]");
    }
  }
  for (double rate : eve_rates) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw ValidationError("eavesdropping rates must lie in [0,1]");
    }
  }
  if (series == SeriesKind::control && !eve_rates.empty()) {
    throw ValidationError("the control series takes no eavesdropping rates");
  }
  if (series != SeriesKind::control && eve_rates.empty()) {
    throw ValidationError("eavesdropper series need at least one rate");
  }
}

namespace {

ChannelPipeline series_pipeline(SeriesKind kind, double rate, double eta) {
  switch (kind) {
    case SeriesKind::control: return control_pipeline(eta);
    case SeriesKind::eve_alice: return eve_near_alice_pipeline(rate, eta);
    case SeriesKind::eve_bob: return eve_near_bob_pipeline(rate, eta);
  }
  throw ValidationError("unknown series kind");
}

}  // namespace

std::vector<TrialRow> run_series(const SeriesConfig& cfg) {
  cfg.validate();
  // The control series iterates a single placeholder rate of 0.
  const std::vector<double> rates =
      cfg.series == SeriesKind::control ? std::vector<double>{0.0}
                                        : cfg.eve_rates;
  std::vector<TrialRow> rows;
  rows.reserve(rates.size() * cfg.eta_values.size() * cfg.trials_per_point);
  std::uint64_t row_index = 0;
  for (double rate : rates) {
    for (double eta : cfg.eta_values) {
      for (std::size_t trial = 0; trial < cfg.trials_per_point; ++trial) {
        TrialRow row;
        row.series = cfg.series;
        row.eta = eta;
        row.eve_rate = rate;
        row.trial_index = trial;
        row.seed = RandomSource::derive(cfg.master_seed, row_index++);
        Bb84Config run;
        run.n = cfg.qubits_per_trial;
        run.pipeline = series_pipeline(cfg.series, rate, eta);
        run.seed = row.seed;
        row.stats = run_bb84(run);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_raw_csv(std::ostream& out, const std::vector<TrialRow>& rows) {
  out << "series,eta,eve_rate,trial_index,seed,sent,received,sifted,matched,"
         "efficiency,sifted_error_rate,attenuation_db\n";
  for (const TrialRow& r : rows) {
    out << series_name(r.series) << ',' << format_double(r.eta) << ','
        << format_double(r.eve_rate) << ',' << r.trial_index << ',' << r.seed
        << ',' << r.stats.sent << ',' << r.stats.received << ','
        << r.stats.sifted << ',' << r.stats.matched << ','
        << format_double(r.stats.efficiency) << ','
        << format_double(r.stats.sifted_error_rate) << ','
        << format_double(r.stats.attenuation_db) << '\n';
  }
}

std::string raw_csv(const std::vector<TrialRow>& rows) {
  std::ostringstream out;
  write_raw_csv(out, rows);
  return out.str();
}

namespace {

/// Least-squares polynomial fit of y against x. Degree 2 normally, degree 1
/// with two points, degree 0 with one.
std::array<double, 3> fit_curve(const std::vector<double>& x,
                                const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n == 1) return {y[0], 0.0, 0.0};
  const std::size_t degree = n == 2 ? 1 : 2;

  // Normal equations for the monomial basis.
  double s[5] = {0, 0, 0, 0, 0};
  double t[3] = {0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    double xp = 1.0;
    for (int p = 0; p <= 4; ++p) {
      if (p <= static_cast<int>(2 * degree)) s[p] += xp;
      xp *= x[i];
    }
    xp = 1.0;
    for (int p = 0; p <= static_cast<int>(degree); ++p) {
      t[p] += y[i] * xp;
      xp *= x[i];
    }
  }
  const std::size_t dim = degree + 1;
  double a[3][4] = {};
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) a[r][c] = s[r + c];
    a[r][dim] = t[r];
  }
  // Gaussian elimination with partial pivoting.
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < dim; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    if (std::abs(a[col][col]) < 1e-30) continue;
    for (std::size_t r = col + 1; r < dim; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= dim; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::array<double, 3> coeff{};
  for (std::size_t r = dim; r-- > 0;) {
    double v = a[r][dim];
    for (std::size_t c = r + 1; c < dim; ++c) v -= a[r][c] * coeff[c];
    coeff[r] = std::abs(a[r][r]) < 1e-30 ? 0.0 : v / a[r][r];
  }
  return coeff;
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<TrialRow>& rows) {
  if (rows.empty()) {
    throw ValidationError("summarize needs at least one trial row");
  }
  // Grouped stats in deterministic key order.
  using PointKey = std::tuple<int, double, double>;  // series, rate, eta
  std::map<PointKey, std::vector<double>> points;
  for (const TrialRow& r : rows) {
    points[{static_cast<int>(r.series), r.eve_rate, r.eta}].push_back(
        r.stats.efficiency);
  }

  std::vector<SummaryRow> summary;
  for (const auto& [key, values] : points) {
    SummaryRow row;
    row.series = static_cast<SeriesKind>(std::get<0>(key));
    row.eve_rate = std::get<1>(key);
    row.eta = std::get<2>(key);
    double sum = 0.0;
    row.min = values.front();
    row.max = values.front();
    for (double v : values) {
      sum += v;
      row.min = std::min(row.min, v);
      row.max = std::max(row.max, v);
    }
    row.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - row.mean) * (v - row.mean);
    row.stddev = values.size() > 1
                     ? std::sqrt(sq / static_cast<double>(values.size() - 1))
                     : 0.0;
    summary.push_back(row);
  }

  // Per-curve fit of mean efficiency against eta.
  using CurveKey = std::pair<int, double>;
  std::map<CurveKey, std::pair<std::vector<double>, std::vector<double>>> curves;
  for (const SummaryRow& row : summary) {
    auto& [xs, ys] = curves[{static_cast<int>(row.series), row.eve_rate}];
    xs.push_back(row.eta);
    ys.push_back(row.mean);
  }
  std::map<CurveKey, std::array<double, 3>> fits;
  for (const auto& [key, xy] : curves) {
    fits[key] = fit_curve(xy.first, xy.second);
  }
  for (SummaryRow& row : summary) {
    row.fit = fits[{static_cast<int>(row.series), row.eve_rate}];
  }
  return summary;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "series,eve_rate,eta,mean_efficiency,stddev_efficiency,"
         "min_efficiency,max_efficiency,fit_c0,fit_c1,fit_c2\n";
  for (const SummaryRow& r : rows) {
    out << series_name(r.series) << ',' << format_double(r.eve_rate) << ','
        << format_double(r.eta) << ',' << format_double(r.mean) << ','
        << format_double(r.stddev) << ',' << format_double(r.min) << ','
        << format_double(r.max) << ',' << format_double(r.fit[0]) << ','
        << format_double(r.fit[1]) << ',' << format_double(r.fit[2]) << '\n';
  }
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  write_summary_csv(out, rows);
  return out.str();
}

// ---------------------------------------------------------------------------
// Conditional demo

double ConditionalStats::p_q0_given_p0() const {
  return accepted == 0 ? std::numeric_limits<double>::quiet_NaN()
                       : static_cast<double>(q_zero) /
                             static_cast<double>(accepted);
}

double ConditionalStats::p_p0() const {
  return trials == 0 ? 0.0
                     : static_cast<double>(accepted) /
                           static_cast<double>(trials);
}

ConditionalStats conditional_demo_local(const Mat2& gate, std::uint64_t trials,
                                        std::uint64_t seed) {
  RandomSource rng(seed);
  const EprMatrix epr{bell::phi_plus()};
  ConditionalStats stats;
  stats.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    EntangledPair pair =
        create_entangled_pair(epr, 3 * t + 1, 3 * t + 2, 3 * t + 3);
    pair.side_a->apply_gate(gate, 0);
    const auto [p, notice] = pair.side_a->measure_entangled(0, rng);
    const int q = pair.side_b->measure_plain(0, rng);
    if (p == 0) {
      ++stats.accepted;
      if (q == 0) ++stats.q_zero;
    }
  }
  return stats;
}

ConditionalStats conditional_demo_driver(SimNode& node, Session& session,
                                         const Mat2& gate,
                                         std::uint64_t trials,
                                         std::uint64_t seed) {
  RandomSource rng(seed);
  const EprMatrix epr{bell::phi_plus()};
  ConditionalStats stats;
  stats.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    EntangledPair pair = node.create_pair(epr);
    const std::uint64_t id_a = pair.side_a->id();
    const std::uint64_t id_b = pair.side_b->id();
    node.send_register(session, id_b);
    pair.side_a->apply_gate(gate, 0);
    const auto [p, notice] = pair.side_a->measure_entangled(0, rng);
    auto returned =
        node.wait_for_register(id_b, std::chrono::milliseconds(10000));
    if (!returned) {
      throw TransportError("peer did not return the reconciled register");
    }
    const int q = returned->measure_plain(0, rng);
    if (p == 0) {
      ++stats.accepted;
      if (q == 0) ++stats.q_zero;
    }
    node.release(id_a);
    node.release(id_b);
  }
  return stats;
}

// ---------------------------------------------------------------------------
// DemoReturner

struct DemoReturner::Impl {
  SimNode& node;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::pair<std::uint64_t, Session*>> queue;
  bool stop = false;
  std::thread worker;

  explicit Impl(SimNode& n) : node(n) {
    node.on_reconciled = [this](std::uint64_t register_id, Session& session) {
      {
        std::lock_guard lock(mu);
        queue.emplace_back(register_id, &session);
      }
      cv.notify_all();
    };
    worker = std::thread([this] { run(); });
  }

  void run() {
    while (true) {
      std::pair<std::uint64_t, Session*> item;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return stop || !queue.empty(); });
        if (queue.empty()) return;
        item = queue.front();
        queue.pop_front();
      }
      try {
        node.send_register(*item.second, item.first);
      } catch (const SimError&) {
        // Session torn down mid-demo; nothing to ship back to.
      }
    }
  }

  ~Impl() {
    node.on_reconciled = nullptr;
    {
      std::lock_guard lock(mu);
      stop = true;
    }
    cv.notify_all();
    worker.join();
  }
};

DemoReturner::DemoReturner(SimNode& node) : impl_(std::make_unique<Impl>(node)) {}

DemoReturner::~DemoReturner() = default;

}  // namespace qsimnet
