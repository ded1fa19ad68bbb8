#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bayesop/analysis.hpp"
#include "bayesop/oracle.hpp"
#include "bayesop/posterior.hpp"
#include "support/brute.hpp"

using namespace bayesop;

namespace {

SignalModel noise(Family f, double s, double bias = 0.0) { return {{f, 0.0, s}, bias, std::nullopt}; }

SignalModel gaussian_mixture(double se, double phi_eps, std::vector<MixtureComponent> comps) {
  return {{Family::Gaussian, 0.0, se}, 0.0, Mixture{phi_eps, std::move(comps)}};
}

double quad_theta1(const Distribution& p, const SignalModel& s, double x) {
  return oracle::quad_posterior_mean(p, s, x).theta1;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::Validation;
}

brute::Fam bf(Family f) { return static_cast<brute::Fam>(static_cast<int>(f)); }

constexpr Family kFams[] = {Family::Gaussian, Family::Laplace, Family::Cauchy};

}  // namespace

// ---------------------------------------------------------------- stable

TEST(StablePosterior, Examples) {
  EXPECT_DOUBLE_EQ(stable_posterior({Family::Gaussian, 0.0, 1.0}, noise(Family::Gaussian, 1.0), 2.0).theta1, 1.0);
  EXPECT_DOUBLE_EQ(stable_posterior({Family::Laplace, 1.0, 2.0}, noise(Family::Laplace, 2.0), 5.0).theta1, 3.0);
  EXPECT_DOUBLE_EQ(stable_posterior({Family::Cauchy, 0.0, 1.0}, noise(Family::Cauchy, 3.0), 8.0).theta1, 2.0);
  const auto r = stable_posterior({Family::Gaussian, 0.5, 1.0}, noise(Family::Gaussian, 2.0, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(r.theta1, 0.5 + 0.2 * 2.5);
  EXPECT_EQ(r.method, Method::ClosedForm);
  EXPECT_EQ(r.shift, r.theta1 - 0.5);
}

TEST(StablePosterior, DispatchErrors) {
  EXPECT_EQ(kind_of([] { stable_posterior({Family::Gaussian, 0.0, 1.0}, noise(Family::Cauchy, 1.0), 1.0); }),
            ErrorKind::Dispatch);
  try {
    stable_posterior({Family::Laplace, 0.0, 1.0}, noise(Family::Laplace, 2.0), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dispatch);
    EXPECT_NE(std::string(e.what()).find("ll_unequal_posterior"), std::string::npos);
  }
  EXPECT_EQ(kind_of([] { stable_posterior({Family::Gaussian, 0.0, 1.0}, noise(Family::Gaussian, 1.0), NAN); }),
            ErrorKind::Validation);
}

// ---------------------------------------------------------------- GC, LC

TEST(GcPosterior, Examples) {
  const Distribution p{Family::Gaussian, 0.0, 1.0};
  EXPECT_EQ(gc_posterior(p, noise(Family::Cauchy, 1.0), 0.0).shift, 0.0);
  EXPECT_EQ(gc_posterior({Family::Gaussian, 2.5, 1.0}, noise(Family::Cauchy, 1.0), 2.5).shift, 0.0);
  const double h10 = gc_posterior(p, noise(Family::Cauchy, 1.0), 10.0).shift;
  EXPECT_NEAR(h10, quad_theta1(p, noise(Family::Cauchy, 1.0), 10.0), 1e-6);
  EXPECT_NEAR(h10, brute::shift(brute::Fam::Gaussian, 1, brute::Fam::Cauchy, 1, 10), 1e-9);
  const double h100 = gc_posterior(p, noise(Family::Cauchy, 1.0), 100.0).shift;
  EXPECT_NEAR(h100, 0.02, 0.02 * 0.02);
  EXPECT_EQ(gc_posterior(p, noise(Family::Cauchy, 1.0), 1.0).combo, Combo::GaussianCauchy);
}

TEST(LcPosterior, Examples) {
  EXPECT_EQ(lc_posterior({Family::Laplace, 0.0, 1.0}, noise(Family::Cauchy, 2.0), 0.0).shift, 0.0);
  const Distribution p{Family::Laplace, 0.0, 1.0};
  const double h1 = lc_posterior(p, noise(Family::Cauchy, 2.0), 1.0).shift;
  EXPECT_NEAR(h1, quad_theta1(p, noise(Family::Cauchy, 2.0), 1.0), 1e-6);
  EXPECT_NEAR(h1, brute::shift(brute::Fam::Laplace, 1, brute::Fam::Cauchy, 2, 1), 1e-9);
  // Var of this prior is 2 s0^2, so the tail law is 4 s0^2 / x
  const double h100 = lc_posterior(p, noise(Family::Cauchy, 1.0), 100.0).shift;
  EXPECT_NEAR(h100, 0.04, 0.04 * 0.02);
  EXPECT_NEAR(h100, brute::shift(brute::Fam::Laplace, 1, brute::Fam::Cauchy, 1, 100), 1e-10);
  EXPECT_NEAR(h100 * 100.0, 4.0068313271018, 1e-9);
}

TEST(GcLcPosterior, WrongFamiliesAreDispatchErrors) {
  EXPECT_EQ(kind_of([] { gc_posterior({Family::Laplace, 0.0, 1.0}, noise(Family::Cauchy, 1.0), 1.0); }),
            ErrorKind::Dispatch);
  EXPECT_EQ(kind_of([] { lc_posterior({Family::Laplace, 0.0, 1.0}, noise(Family::Gaussian, 1.0), 1.0); }),
            ErrorKind::Dispatch);
}

// ---------------------------------------------------------------- LL, GL

TEST(LlUnequalPosterior, Examples) {
  const auto a = ll_unequal_posterior({Family::Laplace, 0.0, 1.0}, noise(Family::Laplace, 0.5), 10.0);
  EXPECT_NEAR(a.shift, 10.0 - 2.0 / 3.0, 1e-3);
  const auto b = ll_unequal_posterior({Family::Laplace, 0.0, 0.5}, noise(Family::Laplace, 1.0), 50.0);
  EXPECT_NEAR(b.shift, 2.0 / 3.0, 1e-3);
  EXPECT_NEAR(b.shift, quad_theta1({Family::Laplace, 0.0, 0.5}, noise(Family::Laplace, 1.0), 50.0), 1e-6);
  EXPECT_EQ(ll_unequal_posterior({Family::Laplace, 0.0, 0.5}, noise(Family::Laplace, 1.0), 0.0).shift, 0.0);
  EXPECT_EQ(kind_of([] { ll_unequal_posterior({Family::Laplace, 0.0, 1.0}, noise(Family::Laplace, 1.0), 1.0); }),
            ErrorKind::Dispatch);
}

TEST(LlUnequalPosterior, NoOverflowForHugeSignals) {
  for (double x : {1e3, 1e5, -1e7}) {
    const double up = ll_unequal_posterior({Family::Laplace, 0.0, 1.0}, noise(Family::Laplace, 0.5), x).shift;
    const double dn = ll_unequal_posterior({Family::Laplace, 0.0, 0.5}, noise(Family::Laplace, 1.0), x).shift;
    EXPECT_NEAR(up, x - std::copysign(2.0 / 3.0, x), 1e-9 * std::abs(x));
    EXPECT_NEAR(dn, std::copysign(2.0 / 3.0, x), 1e-9);
  }
}

TEST(GlPosterior, Examples) {
  const Distribution p{Family::Gaussian, 0.0, 1.0};
  EXPECT_EQ(gl_posterior(p, noise(Family::Laplace, 1.0), 0.0).shift, 0.0);
  EXPECT_NEAR(gl_posterior(p, noise(Family::Laplace, 1.0), 50.0).shift, 1.0, 1e-3);
  const double small = gl_posterior(p, noise(Family::Laplace, 1.0), 0.01).shift;
  EXPECT_NEAR(small, 0.525 * 0.01, 1e-4);
  EXPECT_NEAR(small, quad_theta1(p, noise(Family::Laplace, 1.0), 0.01), 1e-9);
}

TEST(GlPosterior, NoOverflowUpToTenThousandScaleUnits) {
  const Distribution p{Family::Gaussian, 0.0, 1.0};
  for (double x0 : {-1e4, -3e3, 30.0, 500.0, 1e4}) {
    const double x = x0 * std::numbers::sqrt2;
    const double h = gl_posterior(p, noise(Family::Laplace, 0.7), x).shift;
    EXPECT_TRUE(std::isfinite(h));
    EXPECT_NEAR(h, std::copysign(1.0 / 0.7, x), 1e-9);
  }
}

// ---------------------------------------------------------------- swap

TEST(SwapPosterior, LaplacePriorGaussianSignal) {
  const auto r = swap_posterior(SwapBase::GaussianLaplace, {Family::Laplace, 0.0, 1.0}, noise(Family::Gaussian, 1.0), 50.0);
  EXPECT_NEAR(r.theta1, 49.0, 1e-2);
  EXPECT_EQ(r.combo, Combo::LaplaceGaussian);
  EXPECT_EQ(swap_posterior(SwapBase::GaussianLaplace, {Family::Laplace, 0.0, 1.0}, noise(Family::Gaussian, 1.0), 0.0).shift, 0.0);
}

TEST(SwapPosterior, IdentityWithSubstitutedBase) {
  struct Case {
    SwapBase base;
    Family prior, signal;
  };
  const Case cases[] = {{SwapBase::GaussianLaplace, Family::Laplace, Family::Gaussian},
                        {SwapBase::GaussianCauchy, Family::Cauchy, Family::Gaussian},
                        {SwapBase::LaplaceCauchy, Family::Cauchy, Family::Laplace},
                        {SwapBase::LaplaceLaplaceUnequal, Family::Laplace, Family::Laplace}};
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> sc(0.3, 3.0), xv(-30.0, 30.0), t0(-2.0, 2.0);
  for (const auto& c : cases) {
    for (int i = 0; i < 50; ++i) {
      const double s0 = sc(rng), se = sc(rng), th = t0(rng), x = xv(rng);
      if (c.base == SwapBase::LaplaceLaplaceUnequal && std::abs(s0 - se) < 1e-3) continue;
      const auto r = swap_posterior(c.base, {c.prior, th, s0}, noise(c.signal, se), x);
      // base map with the two scales exchanged: families swap roles too
      const Distribution bp{c.signal, th, se};
      const SignalModel bs = noise(c.prior, s0);
      const double base_shift = nonmixture_posterior(bp, bs, x).shift;
      EXPECT_NEAR(r.shift, (x - th) - base_shift, 1e-12 * (1 + std::abs(x - th)));
      EXPECT_EQ(r.method, Method::ClosedForm);
    }
  }
}

TEST(SwapPosterior, WrongFamiliesRejected) {
  EXPECT_EQ(kind_of([] {
              swap_posterior(SwapBase::GaussianCauchy, {Family::Gaussian, 0.0, 1.0}, noise(Family::Cauchy, 1.0), 1.0);
            }),
            ErrorKind::Dispatch);
}

// ---------------------------------------------------------------- grid

TEST(Posterior, OracleEquivalenceGrid) {
  const double offsets[] = {0, 0.5, -0.5, 1, -1, 2, -2, 5, -5, 10, -10, 50, -50};
  for (Family pf : kFams)
    for (Family nf : kFams)
      for (double ratio : {0.5, 1.0, 2.0})
        for (double x0 : offsets) {
          const Distribution p{pf, 0.0, 1.0};
          const SignalModel s = noise(nf, ratio);
          const auto r = nonmixture_posterior(p, s, x0);
          EXPECT_EQ(r.method, Method::ClosedForm);
          const double q = quad_theta1(p, s, x0);
          EXPECT_LE(std::abs(r.theta1 - q), 1e-6 * (1 + std::abs(r.theta1)))
              << to_string(pf) << "/" << to_string(nf) << " r=" << ratio << " x0=" << x0;
        }
}

TEST(Posterior, AgreesWithTestSideIntegrator) {
  // a second, unrelated integrator on the moderate part of the grid
  for (Family pf : kFams)
    for (Family nf : kFams)
      for (double ratio : {0.5, 1.0, 2.0})
        for (double x0 : {0.5, -1.0, 2.0, -5.0, 10.0}) {
          const double h = nonmixture_posterior({pf, 0.0, 1.0}, noise(nf, ratio), x0).shift;
          const double b = brute::shift(bf(pf), 1.0L, bf(nf), ratio, x0);
          EXPECT_NEAR(h, b, 1e-8 * (1 + std::abs(h))) << to_string(pf) << "/" << to_string(nf) << " " << ratio << " " << x0;
        }
}

TEST(Posterior, OddSymmetry) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> sc(0.2, 5.0), dv(0.0, 80.0), t0(-10.0, 10.0);
  for (int i = 0; i < 900; ++i) {
    const Family pf = kFams[i % 3], nf = kFams[(i / 3) % 3];
    const Distribution p{pf, t0(rng), sc(rng)};
    const SignalModel s = noise(nf, sc(rng));
    const double d = dv(rng);
    const double a = nonmixture_posterior(p, s, p.location + d).shift;
    const double b = nonmixture_posterior(p, s, p.location - d).shift;
    EXPECT_LE(std::abs(a + b), 1e-9 * std::max(1.0, std::abs(a))) << to_string(pf) << "/" << to_string(nf) << " d=" << d;
  }
}

TEST(Posterior, LocationScaleEquivariance) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> sc(0.3, 3.0), dv(-20.0, 20.0), cv(-50.0, 50.0), kv(0.1, 10.0);
  for (int i = 0; i < 450; ++i) {
    const Family pf = kFams[i % 3], nf = kFams[(i / 3) % 3];
    const double s0 = sc(rng), se = sc(rng), d = dv(rng), c = cv(rng), k = kv(rng), b = dv(rng) / 4;
    const Distribution p{pf, 0.0, s0};
    const double base = posterior(p, noise(nf, se, b), d + b).theta1;
    const double moved = posterior({pf, c, s0}, noise(nf, se, b), c + d + b).theta1;
    EXPECT_NEAR(moved, base + c, 1e-9 * (1 + std::abs(moved)));
    const double scaled = nonmixture_posterior({pf, 0.0, k * s0}, noise(nf, k * se), k * d).shift;
    const double plain = nonmixture_posterior(p, noise(nf, se), d).shift;
    EXPECT_NEAR(scaled, k * plain, 1e-9 * (1 + std::abs(scaled)));
  }
}

TEST(Posterior, ShiftIsExactlyTheta1MinusTheta0) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> v(-7.0, 7.0);
  for (int i = 0; i < 90; ++i) {
    const Distribution p{kFams[i % 3], v(rng), 1.3};
    const auto r = posterior(p, noise(kFams[(i / 3) % 3], 0.8, v(rng)), v(rng));
    EXPECT_EQ(r.shift, r.theta1 - p.location);
  }
}

TEST(Posterior, BoundedUniformPriorGoesToQuadrature) {
  const auto r = posterior({Family::BoundedUniform, 0.0, 0.3}, noise(Family::Cauchy, 1.0), 2.0);
  EXPECT_EQ(r.method, Method::Quadrature);
  EXPECT_EQ(r.combo, Combo::Other);
  EXPECT_GT(r.shift, 0.0);
  EXPECT_LT(r.shift, 0.3);
}

TEST(LogMarginal, ClosedFormsMatchQuadrature) {
  for (Family pf : kFams)
    for (Family nf : kFams)
      for (double ratio : {0.5, 1.0, 2.0})
        for (double y : {0.0, 0.7, -3.0, 12.0, -40.0}) {
          const Distribution p{pf, 0.4, 1.0}, n{nf, 0.0, ratio};
          const double a = log_marginal(p, n, y);
          const double b = oracle::quad_log_marginal(p, n, y);
          EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(b))) << to_string(pf) << "/" << to_string(nf) << " " << y;
        }
}

// ---------------------------------------------------------------- mixture

TEST(MixturePosterior, EmptyMixtureIsPlainPosterior) {
  const Distribution p{Family::Gaussian, 0.0, 1.0};
  const SignalModel s = gaussian_mixture(1.0, 1.0, {});
  EXPECT_EQ(mixture_alpha(p, s, 3.0), 1.0);
  EXPECT_DOUBLE_EQ(mixture_posterior(p, s, 3.0).theta1, 1.5);
  const SignalModel z = gaussian_mixture(1.0, 1.0, {{0.0, 5.0, Family::Gaussian, 1.0}});
  EXPECT_DOUBLE_EQ(mixture_posterior(p, z, 3.0).theta1, 1.5);
}

TEST(MixturePosterior, GaussianFigureParameters) {
  const Distribution p{Family::Gaussian, 0.0, 1.0};
  const SignalModel s = gaussian_mixture(1.0, 0.5, {{0.5, 5.0, Family::Gaussian, 1.0}});
  EXPECT_NEAR(mixture_posterior(p, s, 0.0).theta1, 0.0, 1e-15);
  const double want = 0.5 / (1 + std::sqrt(2.0) * std::exp(-12.5));
  const double slope = oracle::fd_slope([&](double x) { return mixture_posterior(p, s, x).theta1; }, 0.0, 1e-4);
  EXPECT_NEAR(slope, want, 1e-9);
  EXPECT_NEAR(gaussian_mixture_degroot_coefficient(1.0, 1.0, *s.mixture, 0.0), want, 1e-15);
  const auto r10 = mixture_posterior(p, s, 10.0);
  EXPECT_EQ(r10.combo, Combo::Mixture);
  EXPECT_LE(r10.shift, 0.2 * 0.5 * 10.0);
  EXPECT_NEAR(r10.theta1, quad_theta1(p, s, 10.0), 1e-6);
}

TEST(MixturePosterior, MatchesQuadratureForOtherFamilies) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> xv(-15.0, 25.0), dv(-8.0, 8.0), wv(0.05, 0.6), sc(0.4, 2.5);
  for (int i = 0; i < 60; ++i) {
    const Distribution p{i % 2 ? Family::Laplace : Family::Gaussian, dv(rng) / 4, sc(rng)};
    const double w = wv(rng);
    SignalModel s{{kFams[i % 3], 0.0, sc(rng)}, dv(rng) / 4,
                  Mixture{1 - w, {{w, dv(rng), kFams[(i / 3) % 3], sc(rng)}}}};
    const double x = xv(rng);
    const double a = mixture_posterior(p, s, x).theta1;
    EXPECT_NEAR(a, quad_theta1(p, s, x), 1e-6 * (1 + std::abs(a))) << i;
  }
}

TEST(MixturePosterior, ConvexWeightAndSegment) {
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> xv(-40.0, 40.0), dv(-10.0, 10.0), sc(0.3, 3.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const Distribution p{i % 2 ? Family::Laplace : Family::Gaussian, dv(rng) / 5, sc(rng)};
    const double w1 = 0.7 * u(rng), w2 = (1 - w1) * 0.9 * u(rng);
    SignalModel s{{kFams[i % 3], 0.0, sc(rng)}, 0.0,
                  Mixture{1 - w1 - w2, {{w1, dv(rng), Family::Gaussian, sc(rng)}, {w2, dv(rng), Family::Cauchy, sc(rng)}}}};
    const double x = xv(rng);
    const double alpha = mixture_alpha(p, s, x);
    EXPECT_GE(alpha, 0.0);
    EXPECT_LE(alpha, 1.0);
    SignalModel plain = s;
    plain.mixture.reset();
    const double nm = nonmixture_posterior(p, plain, x).theta1;
    const double t1 = mixture_posterior(p, s, x).theta1;
    EXPECT_GE(t1, std::min(p.location, nm) - 1e-12);
    EXPECT_LE(t1, std::max(p.location, nm) + 1e-12);
  }
}

TEST(MixturePosterior, DegenerateAndUnsupported) {
  const Distribution p{Family::Gaussian, 0.0, 1.0};
  EXPECT_EQ(kind_of([&] { mixture_posterior(p, gaussian_mixture(1.0, 0.0, {{1.0, 5.0, Family::Gaussian, 1.0}}), 1.0); }),
            ErrorKind::Validation);
  EXPECT_EQ(kind_of([] {
              mixture_posterior({Family::Cauchy, 0.0, 1.0}, gaussian_mixture(1.0, 0.5, {{0.5, 5.0, Family::Gaussian, 1.0}}), 1.0);
            }),
            ErrorKind::Validation);
}

TEST(DirichletMixture, DegenerateHyperpriorReducesExactly) {
  const Distribution p{Family::Gaussian, 0.3, 1.2};
  const DirichletMixtureSpec spec{2.0, {{5.0, 0.0, 1.0, 1.0}, {-3.0, 0.0, 0.5, 1.0}}};
  const SignalModel fixed = gaussian_mixture(0.8, 0.5, {{0.25, 5.0, Family::Gaussian, 1.0}, {0.25, -3.0, Family::Gaussian, 0.5}});
  for (double x : {-10.0, -2.0, 0.0, 0.3, 4.0, 9.0, 30.0})
    EXPECT_DOUBLE_EQ(dirichlet_mixture_posterior(p, spec, 0.8, x).theta1, mixture_posterior(p, fixed, x).theta1) << x;
}

TEST(DirichletMixture, SingleUncertainComponent) {
  const Distribution p{Family::Gaussian, 0.0, 1.0};
  const DirichletMixtureSpec spec{1.0, {{5.0, 1.0, 1.0, 1.0}}};
  const SignalModel eq = gaussian_mixture(1.0, 0.5, {{0.5, 5.0, Family::Gaussian, std::sqrt(2.0)}});
  for (double x : {-4.0, 0.0, 2.0, 7.0, 15.0}) {
    const double a = dirichlet_mixture_posterior(p, spec, 1.0, x).theta1;
    EXPECT_NEAR(a, mixture_posterior(p, eq, x).theta1, 1e-15);
    EXPECT_NEAR(a, quad_theta1(p, eq, x), 1e-6);
  }
}

TEST(DirichletMixture, ConvexAtZeroAndValidation) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0.1, 4.0), d(-9.0, 9.0);
  const Distribution p{Family::Gaussian, 0.0, 1.0};
  for (int i = 0; i < 50; ++i) {
    const DirichletMixtureSpec spec{u(rng), {{d(rng), u(rng), u(rng), u(rng)}, {d(rng), u(rng), u(rng), u(rng)}}};
    const double t1 = dirichlet_mixture_posterior(p, spec, u(rng), 0.0).theta1;
    EXPECT_NEAR(t1, 0.0, 1e-15);  // theta1_nm = theta0 at x = theta0
    const double x = d(rng);
    const double se = u(rng);
    const double a = dirichlet_mixture_posterior(p, spec, se, x).theta1;
    const double nm = nonmixture_posterior(p, noise(Family::Gaussian, se), x).theta1;
    EXPECT_GE(a, std::min(0.0, nm) - 1e-12);
    EXPECT_LE(a, std::max(0.0, nm) + 1e-12);
  }
  EXPECT_THROW(dirichlet_mixture_posterior(p, {0.0, {{1.0, 1.0, 1.0, 1.0}}}, 1.0, 1.0), Error);
  EXPECT_THROW(dirichlet_mixture_posterior(p, {1.0, {{1.0, -1.0, 1.0, 1.0}}}, 1.0, 1.0), Error);
  EXPECT_THROW(dirichlet_mixture_posterior(p, {1.0, {{1.0, 1.0, 0.0, 1.0}}}, 1.0, 1.0), Error);
  EXPECT_THROW(dirichlet_mixture_posterior({Family::Laplace, 0.0, 1.0}, {1.0, {}}, 1.0, 1.0), Error);
}

// ---------------------------------------------------------------- bias

TEST(BiasedPosterior, Examples) {
  const Distribution p{Family::Gaussian, 0.0, 1.0};
  const SignalModel s = noise(Family::Gaussian, 1.0, 5.0);
  const auto a = biased_posterior(p, s, 2.0);
  EXPECT_DOUBLE_EQ(a.shift, -1.5);
  EXPECT_EQ(a.combo, Combo::Biased);
  EXPECT_EQ(biased_posterior(p, s, 5.0).shift, 0.0);
  EXPECT_DOUBLE_EQ(biased_posterior(p, s, 7.0).shift, 1.0);
}

TEST(BiasedPosterior, IsHorizontalShiftOfUnbiasedMap) {
  std::mt19937_64 rng(48);
  std::uniform_real_distribution<double> v(-20.0, 20.0), sc(0.3, 3.0);
  for (int i = 0; i < 90; ++i) {
    const Distribution p{kFams[i % 3], v(rng) / 4, sc(rng)};
    const double delta = v(rng) / 2, x = v(rng), se = sc(rng);
    const auto a = biased_posterior(p, noise(kFams[(i / 3) % 3], se, delta), x);
    const auto b = nonmixture_posterior(p, noise(kFams[(i / 3) % 3], se), x - delta);
    EXPECT_DOUBLE_EQ(a.theta1, b.theta1);
    EXPECT_NEAR(a.theta1, quad_theta1(p, noise(kFams[(i / 3) % 3], se, delta), x), 1e-6 * (1 + std::abs(a.theta1)));
  }
}
