// bayesop_cli: sweep | report | trajectory | verify
//
// Each verb reads an optional key = value file (--config) and then applies
// any remaining "--dotted.key value" overrides.
// Exit codes: 0 ok, 2 validation error, 3 numerical convergence failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "bayesop/sim.hpp"

namespace {

using bayesop::config::Config;

Config load(const std::string& path, const std::vector<std::string>& extras) {
  Config cfg = path.empty() ? Config{} : Config::load(path);
  cfg.apply_overrides(extras);
  return cfg;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  bayesop::sim::detail::write_file(path, text);
}

int cmd_sweep(const Config& cfg) {
  namespace sim = bayesop::sim;
  const std::string mode = cfg.get_string("mode", "single");
  const bool gnuplot = cfg.get_bool("gnuplot", false);
  if (mode == "table") {
    const std::string dir = cfg.get_string("output_dir", "sweep_out");
    const sim::SweepSpec spec = sim::read_sweep(cfg);
    cfg.reject_unused();
    for (const auto& f : sim::sweep_table(spec, dir, gnuplot)) std::cerr << "wrote " << f << '\n';
    return 0;
  }
  if (mode != "single") bayesop::fail(bayesop::ErrorKind::Validation, cfg.origin("mode") + ": mode must be single or table");
  const std::string out = cfg.get_string("output", "-");
  const sim::SweepSpec spec = sim::read_sweep(cfg);
  cfg.reject_unused();
  const auto rows = sim::sweep(spec);
  std::ostringstream csv;
  sim::write_sweep_csv(spec, rows, csv);
  emit(out, csv.str());
  if (gnuplot) {
    if (out.empty() || out == "-")
      bayesop::fail(bayesop::ErrorKind::Validation, "gnuplot script needs an output file");
    std::ostringstream gp;
    sim::write_gnuplot({out}, to_string(bayesop::combo_of(spec.model.prior.family, spec.model.signal.noise.family)), gp);
    emit(std::filesystem::path(out).replace_extension(".gp").string(), gp.str());
  }
  return 0;
}

int cmd_report(const Config& cfg) {
  namespace sim = bayesop::sim;
  const std::string format = cfg.get_string("format", "text");
  const std::string out = cfg.get_string("output", "-");
  const sim::ReportSpec spec = sim::read_report(cfg);
  cfg.reject_unused();
  if (format != "text" && format != "json")
    bayesop::fail(bayesop::ErrorKind::Validation, cfg.origin("format") + ": format must be text or json");
  const bayesop::RegimeReport r =
      bayesop::classify_regime(spec.prior, spec.signal, spec.sigma0, spec.sigma_eps, spec.bias);
  std::ostringstream text;
  if (format == "json") text << sim::report_json(spec, r).dump(2) << '\n';
  else sim::write_report_text(spec, r, text);
  emit(out, text.str());
  return 0;
}

int cmd_trajectory(const Config& cfg) {
  namespace sim = bayesop::sim;
  const std::string out = cfg.get_string("output", "-");
  const sim::TrajectorySpec spec = sim::read_trajectory(cfg);
  cfg.reject_unused();
  std::ostringstream csv;
  sim::run_trajectory(spec, csv);
  emit(out, csv.str());
  return 0;
}

int cmd_verify(const Config& cfg) {
  namespace sim = bayesop::sim;
  cfg.reject_unused();
  const sim::VerifyReport rep = sim::verify();
  sim::write_verify(rep, std::cout);
  return rep.pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian opinion-shift calculator"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<CLI::App*> verbs;
  for (const char* name : {"sweep", "report", "trajectory", "verify"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "key = value file");
    sub->allow_extras();
    verbs.push_back(sub);
  }
  verbs[0]->description("tabulate the shift function over a grid of signals (CSV)");
  verbs[1]->description("classify the regime of a prior/signal pair");
  verbs[2]->description("repeated updating against a signal sequence (CSV)");
  verbs[3]->description("closed forms and special functions against the oracles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    for (size_t i = 0; i < verbs.size(); ++i) {
      if (!verbs[i]->parsed()) continue;
      const Config cfg = load(config_path, verbs[i]->remaining());
      switch (i) {
        case 0: return cmd_sweep(cfg);
        case 1: return cmd_report(cfg);
        case 2: return cmd_trajectory(cfg);
        default: return cmd_verify(cfg);
      }
    }
  } catch (const bayesop::Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == bayesop::ErrorKind::Convergence ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
