#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "bayesop/sim.hpp"

using namespace bayesop;
using config::Config;

namespace {

Config cfg_of(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in, "test.cfg");
}

std::string message_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  ADD_FAILURE() << "no error raised";
  return {};
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("bayesop_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- config

TEST(Config, ParsesKeysCommentsAndTypes) {
  const Config c = cfg_of("# header\nprior = laplace   # trailing\n\n  sigma0=2.5\nn_points = 11\nflag = yes\n");
  EXPECT_EQ(c.get_string("prior", ""), "laplace");
  EXPECT_EQ(c.get_double("sigma0", 0), 2.5);
  EXPECT_EQ(c.get_int("n_points", 0), 11);
  EXPECT_TRUE(c.get_bool("flag", false));
  EXPECT_EQ(c.get_double("missing", 7.0), 7.0);
  EXPECT_EQ(c.origin("sigma0"), "test.cfg:4");
  EXPECT_NO_THROW(c.reject_unused());
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_NE(message_of([] { cfg_of("a = 1\nnot a pair\n"); }).find("test.cfg:2"), std::string::npos);
  EXPECT_NE(message_of([] { cfg_of("a = 1\na = 2\n"); }).find("duplicate"), std::string::npos);
  EXPECT_NE(message_of([] { cfg_of("a b = 1\n"); }).find("test.cfg:1"), std::string::npos);
  const Config c = cfg_of("x = 1\nsigma0 = abc\n");
  EXPECT_NE(message_of([&] { c.get_double("sigma0", 1.0); }).find("test.cfg:2"), std::string::npos);
  EXPECT_THROW(c.get_int("sigma0", 0), Error);
  EXPECT_THROW(cfg_of("b = maybe\n").get_bool("b", false), Error);
}

TEST(Config, UnusedKeysAreRejected) {
  const Config c = cfg_of("sigma0 = 1\nsigam_eps = 2\n");
  c.get_double("sigma0", 1.0);
  const std::string m = message_of([&] { c.reject_unused(); });
  EXPECT_NE(m.find("sigam_eps"), std::string::npos);
  EXPECT_NE(m.find("test.cfg:2"), std::string::npos);
}

TEST(Config, OverridesWin) {
  Config c = cfg_of("sigma0 = 1\n");
  c.apply_overrides({"--sigma0", "3", "--mixture.1.delta=5"});
  EXPECT_EQ(c.get_double("sigma0", 0), 3.0);
  EXPECT_EQ(c.get_double("mixture.1.delta", 0), 5.0);
  EXPECT_EQ(c.origin("sigma0"), "--sigma0");
  EXPECT_THROW(c.apply_overrides({"sigma0"}), Error);
  EXPECT_THROW(c.apply_overrides({"--sigma0"}), Error);
}

TEST(Config, IndicesAndPaths) {
  const Config c = cfg_of("mixture.2.delta = 1\nmixture.1.delta = 2\nmixture.eps_weight = 0.5\n");
  EXPECT_EQ(c.indices("mixture"), (std::vector<int>{1, 2}));
  EXPECT_THROW(cfg_of("mixture.x.delta = 1\n").indices("mixture"), Error);
  const auto dir = scratch("paths");
  std::ofstream(dir / "a.cfg") << "signal_file = sig.txt\nabs = /tmp/x\n";
  const Config f = Config::load((dir / "a.cfg").string());
  EXPECT_EQ(f.get_path("signal_file", ""), (dir / "sig.txt").string());
  EXPECT_EQ(f.get_path("abs", ""), "/tmp/x");
  EXPECT_THROW(Config::load((dir / "missing.cfg").string()), Error);
}

// ---------------------------------------------------------------- model

TEST(ReadModel, FamiliesAndMixture) {
  const sim::Model m = sim::read_model(cfg_of(
      "prior = laplace\nsignal = cauchy\ntheta0 = 1\nsigma0 = 2\nsigma_eps = 3\n"
      "mixture.1.weight = 0.3\nmixture.1.delta = 4\nmixture.2.weight = 0.2\nmixture.2.delta = -4\n"
      "mixture.2.sigma = 0.5\n"));
  EXPECT_EQ(m.prior.family, Family::Laplace);
  EXPECT_EQ(m.prior.location, 1.0);
  EXPECT_EQ(m.signal.noise.family, Family::Cauchy);
  ASSERT_TRUE(m.signal.mixture);
  EXPECT_NEAR(m.signal.mixture->eps_weight, 0.5, 1e-15);
  EXPECT_EQ(m.signal.mixture->components.size(), 2u);
  EXPECT_EQ(m.signal.mixture->components[1].scale, 0.5);
}

TEST(ReadModel, ComboKey) {
  const sim::Model m = sim::read_model(cfg_of("combo = cauchy_gaussian\n"));
  EXPECT_EQ(m.prior.family, Family::Cauchy);
  EXPECT_EQ(m.signal.noise.family, Family::Gaussian);
  EXPECT_THROW(sim::read_model(cfg_of("combo = cauchy_gaussian\nprior = laplace\n")), Error);
  EXPECT_THROW(sim::read_model(cfg_of("combo = cauchy\n")), Error);
  EXPECT_THROW(sim::read_model(cfg_of("prior = student\n")), Error);
  EXPECT_THROW(sim::read_model(cfg_of("sigma0 = -1\n")), Error);
}

// ---------------------------------------------------------------- sweep

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(sim::format_double(0.1), "0.1");
  EXPECT_EQ(sim::format_double(-0.0), "0");
  EXPECT_EQ(sim::format_double(5.0), "5");
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_EQ(std::stod(sim::format_double(v)), v);
  }
}

TEST(Sweep, GridAndDefaults) {
  const sim::SweepSpec s = sim::read_sweep(cfg_of("theta0 = 2\n"));
  EXPECT_EQ(s.x_min, -8.0);
  EXPECT_EQ(s.x_max, 12.0);
  EXPECT_EQ(s.n_points, 401);
  const auto rows = sim::sweep(s);
  ASSERT_EQ(rows.size(), 401u);
  EXPECT_EQ(rows.front().x, -8.0);
  EXPECT_EQ(rows.back().x, 12.0);
  EXPECT_EQ(rows[200].x, 2.0);
  EXPECT_EQ(rows[200].result.shift, 0.0);
  EXPECT_THROW(sim::read_sweep(cfg_of("x_min = 3\nx_max = 1\n")), Error);
  EXPECT_THROW(sim::read_sweep(cfg_of("n_points = 1\n")), Error);
}

TEST(Sweep, CsvIsDeterministic) {
  const sim::SweepSpec s = sim::read_sweep(cfg_of(
      "prior = gaussian\nsignal = cauchy\nmixture.1.weight = 0.4\nmixture.1.delta = 5\nn_points = 101\n"));
  std::ostringstream a, b;
  sim::write_sweep_csv(s, sim::sweep(s), a);
  sim::write_sweep_csv(s, sim::sweep(s), b);
  EXPECT_EQ(a.str(), b.str());
  const auto ls = lines(a.str());
  ASSERT_EQ(ls.size(), 102u);
  EXPECT_EQ(ls[0], sim::kSweepHeader);
  EXPECT_EQ(ls[51], "0,0,0,0,closed_form,mixture");
}

TEST(Sweep, TableWritesNineFiles) {
  const auto dir = scratch("table");
  const sim::SweepSpec s = sim::read_sweep(cfg_of("n_points = 5\nx_min = -2\nx_max = 2\n"));
  const auto written = sim::sweep_table(s, dir.string(), true);
  EXPECT_EQ(written.size(), 10u);
  for (const char* name : {"gaussian_gaussian.csv", "laplace_cauchy.csv", "cauchy_cauchy.csv", "table.gp"})
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
  const auto gg = lines(slurp(dir / "gaussian_gaussian.csv"));
  ASSERT_EQ(gg.size(), 6u);
  EXPECT_EQ(gg[5], "2,2,1,1,closed_form,gaussian_gaussian");
  sim::SweepSpec m = s;
  m.model.signal.mixture = Mixture{1.0, {}};
  EXPECT_THROW(sim::sweep_table(m, dir.string(), false), Error);
}

// ---------------------------------------------------------------- report

TEST(Report, JsonFields) {
  const sim::ReportSpec spec = sim::read_report(cfg_of("prior = gaussian\nsignal = laplace\nsigma0 = 2\n"));
  const RegimeReport r = classify_regime(spec.prior, spec.signal, spec.sigma0, spec.sigma_eps, spec.bias);
  const auto j = sim::report_json(spec, r);
  EXPECT_EQ(j["regime"], "bounded_shift");
  EXPECT_EQ(j["combo"], "gaussian_laplace");
  EXPECT_EQ(j["fixed_shift"].get<double>(), 4.0);
  EXPECT_TRUE(j["x_star"].is_null());
  EXPECT_TRUE(j["backfire_interval"].is_null());
  EXPECT_NEAR(j["tau"].get<double>(), 4.0 / r.omega, 1e-12);
}

TEST(Report, TextAndBias) {
  const sim::ReportSpec spec = sim::read_report(cfg_of("bias = 5\n"));
  const RegimeReport r = classify_regime(spec.prior, spec.signal, spec.sigma0, spec.sigma_eps, spec.bias);
  std::ostringstream out;
  sim::write_report_text(spec, r, out);
  const std::string t = out.str();
  EXPECT_NE(t.find("regime:            degroot + backfire"), std::string::npos);
  EXPECT_NE(t.find("backfire_interval: (0, 5)"), std::string::npos);
  EXPECT_THROW(sim::read_report(cfg_of("mixture.1.weight = 0.2\nmixture.1.delta = 3\n")), Error);
}

// ---------------------------------------------------------------- trajectory

TEST(Trajectory, KalmanConstantSignal) {
  const sim::TrajectorySpec s = sim::read_trajectory(cfg_of("steps = 60\nsignal_value = 2\n"));
  std::ostringstream out;
  sim::run_trajectory(s, out);
  const auto ls = lines(out.str());
  ASSERT_EQ(ls.size(), 61u);
  EXPECT_EQ(ls[0], "t,x_t,theta_t,v_t,gain_t");
  EXPECT_EQ(ls[1], "1,2,1,0.5,0.5");
  const auto last = ls.back();
  const double gain = std::stod(last.substr(last.rfind(',') + 1));
  EXPECT_NEAR(gain, kalman_steady_gain(1.0, 1.0), 1e-12);
}

TEST(Trajectory, FrozenMatchesRepeatedPosterior) {
  const sim::TrajectorySpec s =
      sim::read_trajectory(cfg_of("mode = frozen\nprior = laplace\nsignal = cauchy\nsource = list\n"
                                  "signal_list = 3, -1, 4.5\n"));
  std::ostringstream out;
  sim::run_trajectory(s, out);
  const auto ls = lines(out.str());
  ASSERT_EQ(ls.size(), 4u);
  EXPECT_EQ(ls[0], "t,x_t,theta_t,shift_t");
  double theta = 0.0;
  for (int t = 0; t < 3; ++t) {
    const double x = s.signals[static_cast<size_t>(t)];
    theta = lc_posterior({Family::Laplace, theta, 1.0}, {{Family::Cauchy, 0.0, 1.0}, 0.0, std::nullopt}, x).theta1;
    const auto& row = ls[static_cast<size_t>(t) + 1];
    const auto c2 = row.find(',', row.find(',') + 1);
    EXPECT_EQ(std::stod(row.substr(c2 + 1, row.rfind(',') - c2 - 1)), theta) << row;
  }
}

TEST(Trajectory, KalmanScalesWidenThePrior) {
  // v0 large: the first frozen step with Kalman scales is the Kalman update itself
  const sim::TrajectorySpec s = sim::read_trajectory(
      cfg_of("mode = frozen\nscales = kalman\nv0 = 3\nsource = list\nsignal_list = 2\n"));
  std::ostringstream out;
  sim::run_trajectory(s, out);
  EXPECT_EQ(lines(out.str())[1], "1,2,1.6,1.6");
}

TEST(Trajectory, SignalFileErrorsNameTheLine) {
  const auto dir = scratch("signals");
  std::ofstream(dir / "s.txt") << "1.5\n# note\n2x\n";
  std::ofstream(dir / "t.cfg") << "mode = frozen\nsource = file\nsignal_file = s.txt\n";
  const std::string m = message_of([&] { sim::read_trajectory(Config::load((dir / "t.cfg").string())); });
  EXPECT_NE(m.find("s.txt:3"), std::string::npos) << m;
  std::ofstream(dir / "s.txt", std::ios::trunc) << "1.5\n\n2\n";
  const auto ok = sim::read_trajectory(Config::load((dir / "t.cfg").string()));
  EXPECT_EQ(ok.signals, (std::vector<double>{1.5, 2.0}));
}

TEST(Trajectory, Validation) {
  EXPECT_THROW(sim::read_trajectory(cfg_of("prior = cauchy\n")), Error);  // kalman needs gaussians
  EXPECT_THROW(sim::read_trajectory(cfg_of("mode = drift\n")), Error);
  EXPECT_THROW(sim::read_trajectory(cfg_of("v0 = -1\n")), Error);
  EXPECT_THROW(sim::read_trajectory(cfg_of("steps = 0\n")), Error);
  EXPECT_THROW(sim::read_trajectory(cfg_of("source = list\nsignal_list = 1,,2\n")), Error);
  EXPECT_THROW(sim::read_trajectory(cfg_of("source = list\nsignal_list = 1\nsteps = 3\n")), Error);
}

// ---------------------------------------------------------------- verify

TEST(Verify, AllPairsPass) {
  const sim::VerifyReport r = sim::verify();
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_posterior_dev, 1e-6);
  std::ostringstream out;
  sim::write_verify(r, out);
  EXPECT_NE(out.str().find("overall: ok"), std::string::npos);
}
