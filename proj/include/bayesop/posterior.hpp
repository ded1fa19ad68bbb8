#pragma once

// Closed-form posterior means E[theta | X = x] for symmetric prior/noise pairs.
//
// Every kernel in `closed` works on the deviation d = x - b - theta0 and the
// two scales, evaluates the shift for d >= 0 and reflects it for d < 0.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "bayesop/distributions.hpp"
#include "bayesop/oracle.hpp"
#include "bayesop/result.hpp"
#include "bayesop/specfun.hpp"

namespace bayesop {

namespace closed {

using specfun::Complex;

inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kSqrtPi = 1.772453850905516027298167483341;
inline constexpr double kDenominatorFloor = 1e-300;

inline double sgn(double v) { return v < 0 ? -1.0 : 1.0; }

inline bool same_scale(double s0, double se) {
  return std::abs(s0 - se) <= 1e-12 * std::max(s0, se);
}

// Gaussian prior, Cauchy noise. z = (a + i x0)/sqrt(2), a = se/s0, x0 = d/s0.
inline std::optional<double> gc_shift(double d, double s0, double se) {
  if (d == 0.0) return 0.0;
  const double x0 = std::abs(d) / s0;
  const Complex w = specfun::erfcx(Complex(se / s0, x0) / kSqrt2);
  if (!(std::abs(w.real()) > kDenominatorFloor)) return std::nullopt;
  return sgn(d) * (std::abs(d) + se * w.imag() / w.real());
}

inline double gc_log_marginal(double d, double s0, double se) {
  const Complex w = specfun::erfcx(Complex(se / s0, std::abs(d) / s0) / kSqrt2);
  return std::log(w.real()) - std::log(s0 * kSqrt2 * kSqrtPi);
}

// exp(-|u|) against a Cauchy kernel centred at x0 with width a:
//   K = g(-z) - g(z),  g(w) = exp(w) E1(w),  z = x0 + i a.
// This is 2 pi i cosh(z) - Eix(z) + Eix(-z) with the cosh term cancelled
// against the exp(+-z) parts of the two Eix values.
inline Complex lc_kernel(double x0, double a) {
  const Complex z(x0, a);
  return specfun::e1_scaled(-z) - specfun::e1_scaled(z);
}

inline std::optional<double> lc_shift(double d, double s0, double se) {
  if (d == 0.0) return 0.0;
  const Complex K = lc_kernel(std::abs(d) / s0, se / s0);
  if (!(std::abs(K.imag()) > kDenominatorFloor)) return std::nullopt;
  return sgn(d) * (std::abs(d) + se * K.real() / K.imag());
}

inline double lc_log_marginal(double d, double s0, double se) {
  const Complex K = lc_kernel(std::abs(d) / s0, se / s0);
  return std::log(K.imag()) - std::log(2.0 * std::numbers::pi * s0);
}

// Gaussian prior, Laplace noise. a = sqrt(2) s0/se, x0 = d/(sqrt(2) s0).
// The two terms exp(-+a x0) erfc(a/2 -+ x0) share the factor
// exp(-a^2/4 - x0^2); past x0 = a/2 they are rescaled by exp(a x0) instead.
struct GlTerms {
  double t1, t2, log_scale;
};

inline GlTerms gl_terms(double x0, double a) {
  const double h = 0.5 * a;
  if (x0 <= h)
    return {specfun::erfcx_real(h - x0), specfun::erfcx_real(h + x0), -h * h - x0 * x0};
  const double e = x0 - h;
  return {2.0 - std::erfc(e), std::exp(-e * e) * specfun::erfcx_real(h + x0), -a * x0};
}

inline std::optional<double> gl_shift(double d, double s0, double se) {
  if (d == 0.0) return 0.0;
  const double a = kSqrt2 * s0 / se;
  const GlTerms t = gl_terms(std::abs(d) / (kSqrt2 * s0), a);
  return sgn(d) * (s0 * s0 / se) * (t.t1 - t.t2) / (t.t1 + t.t2);
}

inline double gl_log_marginal(double d, double s0, double se) {
  const double a = kSqrt2 * s0 / se;
  const GlTerms t = gl_terms(std::abs(d) / (kSqrt2 * s0), a);
  return 0.25 * a * a + t.log_scale + std::log(t.t1 + t.t2) - std::log(4.0 * se);
}

// Laplace prior (rate a0), Laplace noise (rate ae), q = (ae - a0) x0.
//   E(q) = (e^q - 1)/q,  H(q) = (q e^q - e^q + 1)/q^2
//   shift = ae x0 (e^q + 2 a0 x0 H) / ((a0 + ae)(1 + ae x0 E))
// For q > 0 numerator and denominator are both multiplied by e^-q.
struct LlTerms {
  double n0, d0, E, H;  // (e^q, 1) or (1, e^-q), then E and H with the same scaling
};

inline LlTerms ll_terms(double q) {
  if (std::abs(q) < 0.1) {
    // E = sum q^j/(j+1)!,  H = sum (j+1) q^j/(j+2)!
    double E = 0.0, H = 0.0, p = 1.0, f1 = 1.0, f2 = 2.0;
    for (int j = 0; j < 18; ++j) {
      E += p / f1;
      H += (j + 1) * p / f2;
      p *= q;
      f1 *= j + 2;
      f2 *= j + 3;
    }
    if (q > 0) {
      const double s = std::exp(-q);
      return {1.0, s, E * s, H * s};
    }
    return {std::exp(q), 1.0, E, H};
  }
  if (q > 0) {
    const double m = std::expm1(-q);
    return {1.0, std::exp(-q), -m / q, (q + m) / (q * q)};
  }
  const double m = std::expm1(q);
  return {std::exp(q), 1.0, m / q, (q * std::exp(q) - m) / (q * q)};
}

inline std::optional<double> ll_shift(double d, double s0, double se) {
  if (d == 0.0) return 0.0;
  if (same_scale(s0, se)) return 0.5 * d;
  const double x0 = std::abs(d);
  const double a0 = 1.0 / s0, ae = 1.0 / se;
  const LlTerms t = ll_terms((ae - a0) * x0);
  const double num = ae * x0 * (t.n0 + 2.0 * a0 * x0 * t.H);
  const double den = (ae + a0) * (t.d0 + ae * x0 * t.E);
  return sgn(d) * num / den;
}

inline double ll_log_marginal(double d, double s0, double se) {
  const double x0 = std::abs(d);
  const double a0 = 1.0 / s0, ae = 1.0 / se;
  const double q = (ae - a0) * x0;
  const LlTerms t = ll_terms(q);
  // J0 = (2/(a0+ae)) e^{-ae x0} (1 + ae x0 E(q)), rescaled by e^-q when q > 0
  const double log_pref = q > 0 ? -a0 * x0 : -ae * x0;
  return std::log(a0 * ae / 4.0) + std::log(2.0 / (a0 + ae)) + log_pref +
         std::log(t.d0 + ae * x0 * t.E);
}

/// Overreaction pairs: the base formula with prior and signal roles exchanged.
/// theta1 = x' + h0(theta0 - x'; se, s0), so shift = d - h0(d; se, s0).
template <class Base>
std::optional<double> swapped(Base base, double d, double s0, double se) {
  const auto h = base(d, se, s0);
  if (!h) return std::nullopt;
  return d - *h;
}

/// Shift for any of the nine prior/noise pairs; nullopt when a closed-form
/// denominator degenerates.
inline std::optional<double> shift(Combo c, double d, double s0, double se) {
  switch (c) {
    case Combo::GaussianGaussian: return d * s0 * s0 / (s0 * s0 + se * se);
    case Combo::CauchyCauchy: return d * s0 / (s0 + se);
    case Combo::LaplaceLaplace: return ll_shift(d, s0, se);
    case Combo::GaussianCauchy: return gc_shift(d, s0, se);
    case Combo::LaplaceCauchy: return lc_shift(d, s0, se);
    case Combo::GaussianLaplace: return gl_shift(d, s0, se);
    case Combo::LaplaceGaussian: return swapped(gl_shift, d, s0, se);
    case Combo::CauchyGaussian: return swapped(gc_shift, d, s0, se);
    case Combo::CauchyLaplace: return swapped(lc_shift, d, s0, se);
    default: break;
  }
  return std::nullopt;
}

/// log m(d), m the density of prior + noise at deviation d. The convolution is
/// symmetric in its two factors, so swapped pairs reuse the base form.
inline std::optional<double> log_marginal(Combo c, double d, double s0, double se) {
  switch (c) {
    case Combo::GaussianGaussian: {
      const double v = s0 * s0 + se * se;
      return -0.5 * d * d / v - 0.5 * std::log(2.0 * std::numbers::pi * v);
    }
    case Combo::CauchyCauchy: {
      const double s = s0 + se;
      return -std::log1p((d / s) * (d / s)) - std::log(std::numbers::pi * s);
    }
    case Combo::LaplaceLaplace: return ll_log_marginal(d, s0, se);
    case Combo::GaussianCauchy: return gc_log_marginal(d, s0, se);
    case Combo::CauchyGaussian: return gc_log_marginal(d, se, s0);
    case Combo::LaplaceCauchy: return lc_log_marginal(d, s0, se);
    case Combo::CauchyLaplace: return lc_log_marginal(d, se, s0);
    case Combo::GaussianLaplace: return gl_log_marginal(d, s0, se);
    case Combo::LaplaceGaussian: return gl_log_marginal(d, se, s0);
    default: break;
  }
  return std::nullopt;
}

}  // namespace closed

namespace detail {

inline const oracle::QuadratureConfig& fallback_config() {
  static const oracle::QuadratureConfig cfg{};
  return cfg;
}

inline void check_inputs(const Distribution& prior, const SignalModel& signal, double x) {
  validate(prior);
  validate(signal);
  if (!std::isfinite(x)) fail(ErrorKind::Validation, "signal value must be finite");
}

inline void require_pair(const Distribution& prior, const SignalModel& signal, Family p, Family n,
                         const char* op) {
  if (prior.family != p || signal.noise.family != n)
    fail(ErrorKind::Dispatch, std::string(op) + ": expects a " + to_string(p) + " prior and " +
                                  to_string(n) + " signal, got " + to_string(prior.family) +
                                  "/" + to_string(signal.noise.family));
}

inline void reject_mixture(const SignalModel& signal, const char* op) {
  if (signal.mixture)
    fail(ErrorKind::Dispatch, std::string(op) + ": mixture signals go through mixture_posterior");
}

// Closed form with a quadrature fallback when the denominator degenerates.
inline PosteriorResult finish(const std::optional<double>& h, const Distribution& prior,
                              const SignalModel& signal, double x, Combo combo) {
  if (h && std::isfinite(*h))
    return make_result(prior.location, prior.location + *h, Method::ClosedForm, combo);
  SignalModel plain = signal;
  plain.mixture.reset();
  PosteriorResult r = oracle::quad_posterior_mean(prior, plain, x, fallback_config());
  r.combo = combo;
  r.warnings.push_back("closed-form denominator degenerate; used quadrature");
  return r;
}

inline double deviation(const Distribution& prior, const SignalModel& signal, double x) {
  return x - signal.bias - prior.location;
}

}  // namespace detail

/// Gaussian-Gaussian, equal-scale Laplace-Laplace and Cauchy-Cauchy: linear
/// updating theta1 = theta0 + omega (x - b - theta0).
inline PosteriorResult stable_posterior(const Distribution& prior, const SignalModel& signal,
                                        double x) {
  detail::check_inputs(prior, signal, x);
  detail::reject_mixture(signal, "stable_posterior");
  if (prior.family != signal.noise.family || prior.family == Family::BoundedUniform)
    fail(ErrorKind::Dispatch, "stable_posterior: prior and noise must be the same stable family");
  const double s0 = prior.scale, se = signal.noise.scale;
  if (prior.family == Family::Laplace && !closed::same_scale(s0, se))
    fail(ErrorKind::Dispatch,
         "stable_posterior: Laplace scales differ, use ll_unequal_posterior");
  const Combo c = combo_of(prior.family, signal.noise.family);
  const double d = detail::deviation(prior, signal, x);
  double omega = 0.5;
  if (c == Combo::GaussianGaussian) omega = s0 * s0 / (s0 * s0 + se * se);
  if (c == Combo::CauchyCauchy) omega = s0 / (s0 + se);
  return make_result(prior.location, prior.location + omega * d, Method::ClosedForm, c);
}

inline PosteriorResult gc_posterior(const Distribution& prior, const SignalModel& signal, double x) {
  detail::check_inputs(prior, signal, x);
  detail::reject_mixture(signal, "gc_posterior");
  detail::require_pair(prior, signal, Family::Gaussian, Family::Cauchy, "gc_posterior");
  const double d = detail::deviation(prior, signal, x);
  return detail::finish(closed::gc_shift(d, prior.scale, signal.noise.scale), prior, signal, x,
                        Combo::GaussianCauchy);
}

inline PosteriorResult lc_posterior(const Distribution& prior, const SignalModel& signal, double x) {
  detail::check_inputs(prior, signal, x);
  detail::reject_mixture(signal, "lc_posterior");
  detail::require_pair(prior, signal, Family::Laplace, Family::Cauchy, "lc_posterior");
  const double d = detail::deviation(prior, signal, x);
  return detail::finish(closed::lc_shift(d, prior.scale, signal.noise.scale), prior, signal, x,
                        Combo::LaplaceCauchy);
}

inline PosteriorResult ll_unequal_posterior(const Distribution& prior, const SignalModel& signal,
                                            double x) {
  detail::check_inputs(prior, signal, x);
  detail::reject_mixture(signal, "ll_unequal_posterior");
  detail::require_pair(prior, signal, Family::Laplace, Family::Laplace, "ll_unequal_posterior");
  if (closed::same_scale(prior.scale, signal.noise.scale))
    fail(ErrorKind::Dispatch, "ll_unequal_posterior: equal scales, use stable_posterior");
  const double d = detail::deviation(prior, signal, x);
  return detail::finish(closed::ll_shift(d, prior.scale, signal.noise.scale), prior, signal, x,
                        Combo::LaplaceLaplace);
}

inline PosteriorResult gl_posterior(const Distribution& prior, const SignalModel& signal, double x) {
  detail::check_inputs(prior, signal, x);
  detail::reject_mixture(signal, "gl_posterior");
  detail::require_pair(prior, signal, Family::Gaussian, Family::Laplace, "gl_posterior");
  const double d = detail::deviation(prior, signal, x);
  return detail::finish(closed::gl_shift(d, prior.scale, signal.noise.scale), prior, signal, x,
                        Combo::GaussianLaplace);
}

enum class SwapBase { GaussianLaplace, LaplaceLaplaceUnequal, GaussianCauchy, LaplaceCauchy };

/// Evaluates the base formula with prior location/scale and signal value/noise
/// scale exchanged. The prior must carry the base's noise family and the
/// signal the base's prior family.
inline PosteriorResult swap_posterior(SwapBase base, const Distribution& prior,
                                      const SignalModel& signal, double x) {
  detail::check_inputs(prior, signal, x);
  detail::reject_mixture(signal, "swap_posterior");
  const double s0 = prior.scale, se = signal.noise.scale;
  const double d = detail::deviation(prior, signal, x);
  std::optional<double> h;
  switch (base) {
    case SwapBase::GaussianLaplace:
      detail::require_pair(prior, signal, Family::Laplace, Family::Gaussian, "swap_posterior");
      h = closed::swapped(closed::gl_shift, d, s0, se);
      break;
    case SwapBase::LaplaceLaplaceUnequal:
      detail::require_pair(prior, signal, Family::Laplace, Family::Laplace, "swap_posterior");
      if (closed::same_scale(s0, se))
        fail(ErrorKind::Dispatch, "swap_posterior: equal Laplace scales, use stable_posterior");
      h = closed::swapped(closed::ll_shift, d, s0, se);
      break;
    case SwapBase::GaussianCauchy:
      detail::require_pair(prior, signal, Family::Cauchy, Family::Gaussian, "swap_posterior");
      h = closed::swapped(closed::gc_shift, d, s0, se);
      break;
    case SwapBase::LaplaceCauchy:
      detail::require_pair(prior, signal, Family::Cauchy, Family::Laplace, "swap_posterior");
      h = closed::swapped(closed::lc_shift, d, s0, se);
      break;
  }
  return detail::finish(h, prior, signal, x, combo_of(prior.family, signal.noise.family));
}

/// Non-mixture posterior mean for any supported pair. Pairs without a closed
/// form (bounded uniform prior) are integrated numerically.
inline PosteriorResult nonmixture_posterior(const Distribution& prior, const SignalModel& signal,
                                            double x) {
  detail::check_inputs(prior, signal, x);
  detail::reject_mixture(signal, "nonmixture_posterior");
  const Combo c = combo_of(prior.family, signal.noise.family);
  if (c == Combo::Other) return oracle::quad_posterior_mean(prior, signal, x, detail::fallback_config());
  const double d = detail::deviation(prior, signal, x);
  return detail::finish(closed::shift(c, d, prior.scale, signal.noise.scale), prior, signal, x, c);
}

/// log of the density of x - b under prior + noise, closed form when known.
inline double log_marginal(const Distribution& prior, const Distribution& noise, double y) {
  const Combo c = combo_of(prior.family, noise.family);
  if (auto v = closed::log_marginal(c, y - prior.location, prior.scale, noise.scale)) return *v;
  return oracle::quad_log_marginal(prior, noise, y, detail::fallback_config());
}

/// Confidence weight alpha(x): posterior probability that x came from the
/// state-centred component.
inline double mixture_alpha(const Distribution& prior, const SignalModel& signal, double x) {
  detail::check_inputs(prior, signal, x);
  if (!signal.mixture) return 1.0;
  const Mixture& m = *signal.mixture;
  if (!(m.eps_weight > 0.0))
    fail(ErrorKind::Validation, "mixture: state-centred weight is 0, alpha is undefined");
  const double la = std::log(m.eps_weight) + log_marginal(prior, signal.noise, x - signal.bias);
  double total = la;
  for (const auto& c : m.components)
    if (c.weight > 0)
      total = oracle::detail::log_add_exp(
          total, std::log(c.weight) +
                     log_pdf(Distribution{c.family, 0.0, c.scale}, x - c.bias_point));
  return std::exp(la - total);
}

/// theta1 = alpha theta1_nm + (1 - alpha) theta0.
inline PosteriorResult mixture_posterior(const Distribution& prior, const SignalModel& signal,
                                         double x) {
  detail::check_inputs(prior, signal, x);
  if (signal.mixture && prior.family == Family::Cauchy)
    fail(ErrorKind::Validation, "mixture signal needs a prior with a finite mean (not Cauchy)");
  SignalModel plain = signal;
  plain.mixture.reset();
  PosteriorResult nm = nonmixture_posterior(prior, plain, x);
  const double alpha = mixture_alpha(prior, signal, x);
  PosteriorResult r = make_result(prior.location, prior.location + alpha * nm.shift, nm.method,
                                  signal.mixture ? Combo::Mixture : nm.combo);
  r.warnings = nm.warnings;
  return r;
}

struct DirichletComponent {
  double delta = 0.0;  // mean of the uncertain bias point
  double tau = 0.0;    // its standard deviation
  double sigma = 1.0;  // component noise scale
  double alpha = 1.0;  // Dirichlet concentration
};

struct DirichletMixtureSpec {
  double alpha_eps = 1.0;
  std::vector<DirichletComponent> components;
};

/// Gaussian bias points with Gaussian hyperpriors and Dirichlet weights: each
/// component becomes N(delta, tau^2 + sigma^2) with weight alpha_j / sum(alpha).
inline Mixture effective_mixture(const DirichletMixtureSpec& spec) {
  if (!(spec.alpha_eps > 0) || !std::isfinite(spec.alpha_eps))
    fail(ErrorKind::Validation, "dirichlet: concentration parameters must be > 0");
  double total = spec.alpha_eps;
  for (const auto& c : spec.components) {
    if (!(c.alpha > 0) || !std::isfinite(c.alpha))
      fail(ErrorKind::Validation, "dirichlet: concentration parameters must be > 0");
    if (!(c.tau >= 0) || !std::isfinite(c.tau))
      fail(ErrorKind::Validation, "dirichlet: tau must be finite and >= 0");
    if (!(c.sigma > 0) || !std::isfinite(c.sigma))
      fail(ErrorKind::Validation, "dirichlet: sigma must be finite and > 0");
    if (!std::isfinite(c.delta)) fail(ErrorKind::Validation, "dirichlet: delta must be finite");
    total += c.alpha;
  }
  Mixture m;
  m.eps_weight = spec.alpha_eps / total;
  for (const auto& c : spec.components)
    m.components.push_back({c.alpha / total, c.delta, Family::Gaussian,
                            std::sqrt(c.tau * c.tau + c.sigma * c.sigma)});
  return m;
}

inline PosteriorResult dirichlet_mixture_posterior(const Distribution& prior,
                                                   const DirichletMixtureSpec& spec,
                                                   double sigma_eps, double x) {
  if (prior.family != Family::Gaussian)
    fail(ErrorKind::Dispatch, "dirichlet_mixture_posterior: expects a Gaussian prior");
  SignalModel s{{Family::Gaussian, 0.0, sigma_eps}, 0.0, effective_mixture(spec)};
  return mixture_posterior(prior, s, x);
}

/// theta1 = mu(x - Delta) with mu the unbiased posterior-mean map.
inline PosteriorResult biased_posterior(const Distribution& prior, const SignalModel& signal,
                                        double x) {
  detail::check_inputs(prior, signal, x);
  SignalModel unbiased = signal;
  unbiased.bias = 0.0;
  // mixture components sit at fixed signal values, so only the
  // state-centred component is shifted; mixture_posterior handles that
  if (signal.mixture) return mixture_posterior(prior, signal, x);
  PosteriorResult r = nonmixture_posterior(prior, unbiased, x - signal.bias);
  r.combo = Combo::Biased;
  return r;
}

/// Dispatcher used by the CLI: mixture, biased or plain pair.
inline PosteriorResult posterior(const Distribution& prior, const SignalModel& signal, double x) {
  if (signal.mixture) return mixture_posterior(prior, signal, x);
  if (signal.bias != 0.0) return biased_posterior(prior, signal, x);
  return nonmixture_posterior(prior, signal, x);
}

}  // namespace bayesop
