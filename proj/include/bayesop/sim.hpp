#pragma once

// Driver layer behind the command-line tool: sweeps of the shift function,
// regime reports, repeated-update trajectories and the oracle grid check.

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bayesop/analysis.hpp"
#include "bayesop/config.hpp"
#include "bayesop/oracle.hpp"
#include "bayesop/posterior.hpp"
#include "bayesop/reference_specfun.hpp"

namespace bayesop::sim {

/// Shortest representation that reads back to the same double.
inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // no "-0" in output
  std::array<char, 32> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

struct Model {
  Distribution prior{Family::Gaussian, 0.0, 1.0};
  SignalModel signal{{Family::Gaussian, 0.0, 1.0}, 0.0, std::nullopt};
};

/// prior/signal/theta0/sigma0/sigma_eps/bias plus optional mixture.N.* keys.
/// "combo = gaussian_cauchy" may replace the two family keys.
inline Model read_model(const config::Config& cfg) {
  Model m;
  std::string pf = cfg.get_string("prior", "gaussian"), nf = cfg.get_string("signal", "gaussian");
  if (cfg.has("combo")) {
    if (cfg.has("prior") || cfg.has("signal"))
      fail(ErrorKind::Validation, cfg.origin("combo") + ": give either combo or prior/signal");
    const std::string c = cfg.get_string("combo", "");
    const auto us = c.find('_');
    if (us == std::string::npos)
      fail(ErrorKind::Validation, cfg.origin("combo") + ": combo must look like prior_signal");
    pf = c.substr(0, us);
    nf = c.substr(us + 1);
  }
  m.prior = {parse_family(pf), cfg.get_double("theta0", 0.0), cfg.get_double("sigma0", 1.0)};
  m.signal.noise = {parse_family(nf), 0.0, cfg.get_double("sigma_eps", 1.0)};
  m.signal.bias = cfg.get_double("bias", 0.0);

  const auto idx = cfg.indices("mixture");
  if (!idx.empty() || cfg.has("mixture.eps_weight")) {
    Mixture mix;
    double used = 0.0;
    for (int i : idx) {
      const std::string k = "mixture." + std::to_string(i) + ".";
      MixtureComponent c;
      c.weight = cfg.get_double(k + "weight", 0.0);
      c.bias_point = cfg.get_double(k + "delta", 0.0);
      c.family = parse_family(cfg.get_string(k + "family", "gaussian"));
      c.scale = cfg.get_double(k + "sigma", 1.0);
      used += c.weight;
      mix.components.push_back(c);
    }
    mix.eps_weight = cfg.get_double("mixture.eps_weight", 1.0 - used);
    m.signal.mixture = mix;
  }
  validate(m.prior);
  validate(m.signal);
  return m;
}

struct SweepSpec {
  Model model;
  double x_min = -10.0;
  double x_max = 10.0;
  long n_points = 401;
};

inline void validate(const SweepSpec& s) {
  if (!std::isfinite(s.x_min) || !std::isfinite(s.x_max) || !(s.x_min < s.x_max))
    fail(ErrorKind::Validation, "sweep: need finite x_min < x_max");
  if (s.n_points < 2) fail(ErrorKind::Validation, "sweep: n_points must be >= 2");
}

inline SweepSpec read_sweep(const config::Config& cfg) {
  SweepSpec s;
  s.model = read_model(cfg);
  const double t0 = s.model.prior.location;
  s.x_min = cfg.get_double("x_min", t0 - 10.0);
  s.x_max = cfg.get_double("x_max", t0 + 10.0);
  s.n_points = cfg.get_int("n_points", 401);
  validate(s);
  return s;
}

struct SweepRow {
  double x = 0.0;
  PosteriorResult result;
};

inline double grid_point(const SweepSpec& s, long i) {
  if (i == s.n_points - 1) return s.x_max;
  return s.x_min + (s.x_max - s.x_min) * static_cast<double>(i) / static_cast<double>(s.n_points - 1);
}

/// Every row is computed before anything is written, so a failure leaves no
/// partial file behind.
inline std::vector<SweepRow> sweep(const SweepSpec& s) {
  validate(s);
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<size_t>(s.n_points));
  for (long i = 0; i < s.n_points; ++i) {
    const double x = grid_point(s, i);
    rows.push_back({x, posterior(s.model.prior, s.model.signal, x)});
  }
  return rows;
}

inline constexpr const char* kSweepHeader = "x,x_minus_theta0,shift,theta1,method,combo";

inline void write_sweep_csv(const SweepSpec& s, const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows)
    out << format_double(r.x) << ',' << format_double(r.x - s.model.prior.location) << ','
        << format_double(r.result.shift) << ',' << format_double(r.result.theta1) << ','
        << to_string(r.result.method) << ',' << to_string(r.result.combo) << '\n';
}

inline void write_gnuplot(const std::vector<std::string>& csv_files, const std::string& title,
                          std::ostream& out) {
  out << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set title '" << title << "'\n"
      << "set xlabel 'x - theta0'\nset ylabel 'theta1 - theta0'\nset grid\n"
      << "plot ";
  for (size_t i = 0; i < csv_files.size(); ++i) {
    const std::string name = std::filesystem::path(csv_files[i]).stem().string();
    out << (i ? ", \\\n     " : "") << "'" << csv_files[i] << "' using 2:3 with lines title '"
        << name << "'";
  }
  out << '\n';
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Validation, "cannot write " + path.string());
  f << text;
}

}  // namespace detail

/// The nine prior/signal pairs at one set of scales, one CSV each.
inline std::vector<std::string> sweep_table(const SweepSpec& base, const std::string& dir,
                                            bool gnuplot) {
  if (base.model.signal.mixture)
    fail(ErrorKind::Validation, "sweep table mode does not take a mixture");
  // compute everything first
  std::vector<std::pair<std::string, std::string>> files;
  for (int c = 0; c < 9; ++c) {
    const Combo combo = static_cast<Combo>(c);
    SweepSpec s = base;
    s.model.prior.family = prior_family(combo);
    s.model.signal.noise.family = noise_family(combo);
    std::ostringstream csv;
    write_sweep_csv(s, sweep(s), csv);
    files.emplace_back(std::string(to_string(combo)) + ".csv", csv.str());
  }
  std::vector<std::string> written;
  for (const auto& [name, text] : files) {
    const auto path = std::filesystem::path(dir) / name;
    detail::write_file(path, text);
    written.push_back(path.string());
  }
  if (gnuplot) {
    std::vector<std::string> names;
    for (const auto& f : files) names.push_back(f.first);
    std::ostringstream gp;
    write_gnuplot(names, "shift functions", gp);
    detail::write_file(std::filesystem::path(dir) / "table.gp", gp.str());
    written.push_back((std::filesystem::path(dir) / "table.gp").string());
  }
  return written;
}

// ---------------------------------------------------------------- report

struct ReportSpec {
  Family prior = Family::Gaussian;
  Family signal = Family::Gaussian;
  double sigma0 = 1.0;
  double sigma_eps = 1.0;
  double bias = 0.0;
};

inline ReportSpec read_report(const config::Config& cfg) {
  const Model m = read_model(cfg);
  if (m.signal.mixture) fail(ErrorKind::Validation, "report: mixture signals are not classified");
  return {m.prior.family, m.signal.noise.family, m.prior.scale, m.signal.noise.scale, m.signal.bias};
}

inline nlohmann::json report_json(const ReportSpec& spec, const RegimeReport& r) {
  nlohmann::json j;
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  j["prior"] = to_string(spec.prior);
  j["signal"] = to_string(spec.signal);
  j["sigma0"] = spec.sigma0;
  j["sigma_eps"] = spec.sigma_eps;
  j["bias"] = spec.bias;
  j["combo"] = to_string(r.combo);
  j["regime"] = to_string(r.regime);
  j["omega"] = r.omega;
  j["tau"] = opt(r.tau);
  j["x_star"] = opt(r.x_star);
  j["fixed_shift"] = opt(r.fixed_shift);
  j["asymptote"] = r.asymptote;
  j["backfire"] = r.backfire;
  j["backfire_interval"] = r.backfire_interval
                               ? nlohmann::json::array({r.backfire_interval->first, r.backfire_interval->second})
                               : nlohmann::json();
  return j;
}

inline void write_report_text(const ReportSpec& spec, const RegimeReport& r, std::ostream& out) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("-"); };
  out << "prior:             " << to_string(spec.prior) << " (scale " << format_double(spec.sigma0) << ")\n"
      << "signal:            " << to_string(spec.signal) << " (scale " << format_double(spec.sigma_eps)
      << ", bias " << format_double(spec.bias) << ")\n"
      << "regime:            " << to_string(r.regime) << (r.backfire ? " + backfire" : "") << '\n'
      << "omega:             " << format_double(r.omega) << '\n'
      << "tau:               " << opt(r.tau) << '\n'
      << "x_star:            " << opt(r.x_star) << '\n'
      << "fixed_shift:       " << opt(r.fixed_shift) << '\n'
      << "asymptote:         " << r.asymptote << '\n'
      << "backfire_interval: "
      << (r.backfire_interval ? "(" + format_double(r.backfire_interval->first) + ", " +
                                    format_double(r.backfire_interval->second) + ")"
                              : std::string("-"))
      << '\n';
}

// ------------------------------------------------------------ trajectory

enum class TrajectoryMode { FrozenKernel, Kalman };
enum class ScalePolicy { FixedScales, KalmanScales };

struct TrajectorySpec {
  TrajectoryMode mode = TrajectoryMode::Kalman;
  ScalePolicy scales = ScalePolicy::FixedScales;
  Model model;
  double v0 = 0.0;
  std::vector<double> signals;  // one per step
};

/// One number per line; blank lines and '#' comments are skipped.
inline std::vector<double> parse_signal_stream(std::istream& in, const std::string& source) {
  std::vector<double> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    const std::string body = config::detail::trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    double v = 0;
    const auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc() || p != body.data() + body.size() || !std::isfinite(v))
      fail(ErrorKind::Validation, source + ":" + std::to_string(n) + ": not a number: '" + body + "'");
    out.push_back(v);
  }
  return out;
}

inline std::vector<double> parse_signal_list(const std::string& text, const std::string& origin) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  for (int n = 1; std::getline(ss, item, ','); ++n) {
    const std::string t = config::detail::trim(item);
    double v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v))
      fail(ErrorKind::Validation, origin + ": list item " + std::to_string(n) + " is not a number: '" + t + "'");
    out.push_back(v);
  }
  return out;
}

inline TrajectorySpec read_trajectory(const config::Config& cfg) {
  TrajectorySpec s;
  const std::string mode = cfg.get_string("mode", "kalman");
  if (mode == "kalman") s.mode = TrajectoryMode::Kalman;
  else if (mode == "frozen" || mode == "frozen_kernel") s.mode = TrajectoryMode::FrozenKernel;
  else fail(ErrorKind::Validation, cfg.origin("mode") + ": mode must be kalman or frozen");
  const std::string sc = cfg.get_string("scales", "fixed");
  if (sc == "fixed") s.scales = ScalePolicy::FixedScales;
  else if (sc == "kalman") s.scales = ScalePolicy::KalmanScales;
  else fail(ErrorKind::Validation, cfg.origin("scales") + ": scales must be fixed or kalman");
  s.model = read_model(cfg);
  if (s.mode == TrajectoryMode::Kalman &&
      (s.model.prior.family != Family::Gaussian || s.model.signal.noise.family != Family::Gaussian ||
       s.model.signal.mixture || s.model.signal.bias != 0.0))
    fail(ErrorKind::Validation, "trajectory: kalman mode needs an unbiased gaussian prior and signal");
  s.v0 = cfg.get_double("v0", 0.0);
  if (!(s.v0 >= 0.0) || !std::isfinite(s.v0)) fail(ErrorKind::Validation, "trajectory: v0 must be >= 0");

  const std::string source = cfg.get_string("source", "constant");
  const long steps = cfg.get_int("steps", source == "constant" ? 50 : 0);
  if (source == "constant") {
    s.signals.assign(static_cast<size_t>(std::max(steps, 0L)), cfg.get_double("signal_value", 1.0));
  } else if (source == "list") {
    s.signals = parse_signal_list(cfg.get_string("signal_list", ""), cfg.origin("signal_list"));
  } else if (source == "file") {
    const std::string path = cfg.get_path("signal_file", "");
    std::ifstream f(path);
    if (!f) fail(ErrorKind::Validation, "trajectory: cannot open signal file '" + path + "'");
    s.signals = parse_signal_stream(f, path);
  } else {
    fail(ErrorKind::Validation, cfg.origin("source") + ": source must be constant, list or file");
  }
  if (source != "constant" && steps > 0) {
    if (static_cast<size_t>(steps) > s.signals.size())
      fail(ErrorKind::Validation, "trajectory: steps exceeds the number of signals given");
    s.signals.resize(static_cast<size_t>(steps));
  }
  if (s.signals.empty()) fail(ErrorKind::Validation, "trajectory: steps must be >= 1");
  return s;
}

inline void run_trajectory(const TrajectorySpec& s, std::ostream& out) {
  if (s.signals.empty()) fail(ErrorKind::Validation, "trajectory: steps must be >= 1");
  const double s0 = s.model.prior.scale, se = s.model.signal.noise.scale;
  std::ostringstream csv;
  if (s.mode == TrajectoryMode::Kalman) {
    csv << "t,x_t,theta_t,v_t,gain_t\n";
    KalmanState st{s.model.prior.location, s.v0, 0.0};
    for (size_t t = 0; t < s.signals.size(); ++t) {
      st = kalman_step(st, s.signals[t], s0, se);
      csv << t + 1 << ',' << format_double(s.signals[t]) << ',' << format_double(st.theta) << ','
          << format_double(st.v) << ',' << format_double(st.gain) << '\n';
    }
  } else {
    // Prior re-centred at theta_t each step. KalmanScales sets the prior
    // scale to sqrt(v + sigma0^2) and carries v through the Kalman recursion.
    csv << "t,x_t,theta_t,shift_t\n";
    Distribution prior = s.model.prior;
    double v = s.v0;
    for (size_t t = 0; t < s.signals.size(); ++t) {
      if (s.scales == ScalePolicy::KalmanScales) prior.scale = std::sqrt(v + s0 * s0);
      const PosteriorResult r = posterior(prior, s.model.signal, s.signals[t]);
      if (s.scales == ScalePolicy::KalmanScales) v = kalman_step({0.0, v, 0.0}, 0.0, s0, se).v;
      prior.location = r.theta1;
      csv << t + 1 << ',' << format_double(s.signals[t]) << ',' << format_double(r.theta1) << ','
          << format_double(r.shift) << '\n';
    }
  }
  out << csv.str();
}

// ---------------------------------------------------------------- verify

struct VerifyRow {
  Combo combo = Combo::Other;
  double max_posterior_dev = 0.0;  // max |closed - quadrature| / (1 + |theta1|)
  int points = 0;
};

struct VerifyReport {
  std::vector<VerifyRow> rows;
  double max_posterior_dev = 0.0;
  std::array<double, 4> specfun_dev{};  // erfcx (rel), eix (rel), si, ci (abs)
  bool pass = false;
};

inline constexpr std::array<double, 3> kVerifyRatios{0.5, 1.0, 2.0};
inline constexpr std::array<double, 13> kVerifyOffsets{0, 0.5, -0.5, 1, -1, 2, -2, 5, -5, 10, -10, 50, -50};

/// Closed forms against quadrature on the standard grid, and the special
/// functions against the high-precision reference on a fixed sample.
inline VerifyReport verify(const oracle::QuadratureConfig& cfg = {}) {
  VerifyReport rep;
  for (int c = 0; c < 9; ++c) {
    VerifyRow row{static_cast<Combo>(c), 0.0, 0};
    for (double ratio : kVerifyRatios)
      for (double x0 : kVerifyOffsets) {
        const Distribution prior{prior_family(row.combo), 0.0, 1.0};
        const SignalModel signal{{noise_family(row.combo), 0.0, ratio}, 0.0, std::nullopt};
        const PosteriorResult a = nonmixture_posterior(prior, signal, x0);
        const PosteriorResult b = oracle::quad_posterior_mean(prior, signal, x0, cfg);
        row.max_posterior_dev = std::max(row.max_posterior_dev,
                                         std::abs(a.theta1 - b.theta1) / (1.0 + std::abs(b.theta1)));
        ++row.points;
      }
    rep.max_posterior_dev = std::max(rep.max_posterior_dev, row.max_posterior_dev);
    rep.rows.push_back(row);
  }
  using oracle::SpecialFunction;
  using specfun::Complex;
  for (int i = 0; i < 40; ++i) {
    const double u = (i + 0.5) / 40.0;
    const Complex ze(30.0 * u, 60.0 * (u - 0.5) * std::cos(7.0 * i));
    const Complex zi(-20.0 + 40.0 * u, (i % 2 ? 1.0 : -1.0) * (0.1 + 9.9 * std::abs(std::sin(3.0 * i))));
    const double a = 60.0 * u;
    auto rel = [](Complex x, Complex y) { return std::abs(x - y) / std::abs(y); };
    rep.specfun_dev[0] = std::max(rep.specfun_dev[0], rel(specfun::erfcx(ze), oracle::reference_specfun(SpecialFunction::Erfcx, ze)));
    rep.specfun_dev[1] = std::max(rep.specfun_dev[1], rel(specfun::eix(zi), oracle::reference_specfun(SpecialFunction::Eix, zi)));
    rep.specfun_dev[2] = std::max(rep.specfun_dev[2], std::abs(specfun::si(a) - oracle::reference_specfun(SpecialFunction::Si, a).real()));
    rep.specfun_dev[3] = std::max(rep.specfun_dev[3], std::abs(specfun::ci(a) - oracle::reference_specfun(SpecialFunction::Ci, a).real()));
  }
  rep.pass = rep.max_posterior_dev <= 1e-6 && rep.specfun_dev[0] <= 1e-12 &&
             rep.specfun_dev[1] <= 1e-10 && rep.specfun_dev[2] <= 1e-12 && rep.specfun_dev[3] <= 1e-12;
  return rep;
}

inline void write_verify(const VerifyReport& rep, std::ostream& out) {
  out << "combo,points,max_rel_dev\n";
  for (const auto& r : rep.rows)
    out << to_string(r.combo) << ',' << r.points << ',' << format_double(r.max_posterior_dev) << '\n';
  out << "specfun erfcx max rel dev: " << format_double(rep.specfun_dev[0]) << '\n'
      << "specfun eix   max rel dev: " << format_double(rep.specfun_dev[1]) << '\n'
      << "specfun si    max abs dev: " << format_double(rep.specfun_dev[2]) << '\n'
      << "specfun ci    max abs dev: " << format_double(rep.specfun_dev[3]) << '\n'
      << "overall: " << (rep.pass ? "ok" : "FAILED") << " (posterior max " << format_double(rep.max_posterior_dev)
      << ")\n";
}

}  // namespace bayesop::sim
