#pragma once

// Brute-force ground truth: the posterior mean as a ratio of two integrals,
// evaluated by adaptive quadrature, plus finite-difference slopes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "bayesop/distributions.hpp"
#include "bayesop/quadrature.hpp"
#include "bayesop/result.hpp"

namespace bayesop::oracle {

using quad::TailTransform;

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  TailTransform tail_transform = TailTransform::RationalMap;
};

namespace detail {

inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Log of the (unnormalised) posterior in u = theta - theta0.
struct LogPosterior {
  Distribution prior;
  SignalModel signal;
  double x;

  double operator()(double u) const {
    const double theta = prior.location + u;
    const double lp = log_pdf(prior, theta);
    if (lp == -std::numeric_limits<double>::infinity()) return lp;
    double ll = log_pdf(signal.noise, x - signal.bias - theta);
    if (signal.mixture) {
      const Mixture& m = *signal.mixture;
      ll = m.eps_weight > 0 ? std::log(m.eps_weight) + ll
                            : -std::numeric_limits<double>::infinity();
      for (const auto& c : m.components)
        if (c.weight > 0)
          ll = log_add_exp(ll, std::log(c.weight) +
                                   log_pdf(Distribution{c.family, 0.0, c.scale}, x - c.bias_point));
    }
    return lp + ll;
  }
};

struct Frame {
  double lo, hi;                    // integration limits in u
  double peak_u, peak_log;          // approximate maximiser and maximum
  std::vector<double> breakpoints;  // in u
  double scale;                     // tail scale
};

template <class LogF>
Frame frame_for(const LogF& logf, const Distribution& prior, double x0,
                double noise_scale, const std::vector<double>& extra) {
  Frame fr;
  fr.scale = std::max(prior.scale, noise_scale);
  const bool bounded = prior.family == Family::BoundedUniform;
  fr.lo = bounded ? -prior.scale : -std::numeric_limits<double>::infinity();
  fr.hi = bounded ? prior.scale : std::numeric_limits<double>::infinity();

  // The maximiser of prior x likelihood sits between the two centres.
  double a = std::min(0.0, x0), b = std::max(0.0, x0);
  if (bounded) {
    a = std::clamp(a, fr.lo, fr.hi);
    b = std::clamp(b, fr.lo, fr.hi);
  }
  const int n = 64;
  double best_u = a, best = logf(a);
  for (int i = 1; i <= n; ++i) {
    const double u = a + (b - a) * i / n;
    const double v = logf(u);
    if (v > best) best = v, best_u = u;
  }
  if (b > a) {
    // golden-section polish inside the neighbouring grid cells
    const double h = (b - a) / n;
    double lo = std::max(a, best_u - h), hi = std::min(b, best_u + h);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = logf(c), fd = logf(d);
    for (int it = 0; it < 80 && hi - lo > 1e-12 * fr.scale; ++it) {
      if (fc > fd) {
        hi = d, d = c, fd = fc;
        c = hi - g * (hi - lo), fc = logf(c);
      } else {
        lo = c, c = d, fc = fd;
        d = lo + g * (hi - lo), fd = logf(d);
      }
    }
    const double u = 0.5 * (lo + hi);
    const double v = logf(u);
    if (v > best) best = v, best_u = u;
  }
  fr.peak_u = best_u;
  fr.peak_log = best;
  fr.breakpoints = {0.0, x0, best_u};
  for (double e : extra) fr.breakpoints.push_back(e);
  return fr;
}

inline quad::Options options(const QuadratureConfig& cfg, double abs_tol, double scale) {
  quad::Options o;
  o.abs_tol = abs_tol;
  o.rel_tol = cfg.rel_tol;
  o.max_subdivisions = cfg.max_subdivisions;
  o.tail_transform = cfg.tail_transform;
  o.tail_scale = scale;
  return o;
}

}  // namespace detail

/// Ratio-of-integrals posterior mean. Both integrals are scaled by the peak
/// of the integrand so the result is insensitive to its absolute size.
inline PosteriorResult quad_posterior_mean(const Distribution& prior, const SignalModel& signal,
                                           double x, const QuadratureConfig& cfg = {}) {
  validate(prior);
  validate(signal);
  if (!std::isfinite(x)) fail(ErrorKind::Validation, "signal value must be finite");
  if (!(cfg.abs_tol > 0) || !(cfg.rel_tol > 0))
    fail(ErrorKind::Validation, "quadrature tolerances must be > 0");
  if (signal.mixture && prior.family == Family::Cauchy)
    fail(ErrorKind::Validation, "mixture signal needs a prior with a finite mean");

  const double theta0 = prior.location;
  const double x0 = x - signal.bias - theta0;
  const detail::LogPosterior logf{prior, signal, x};
  std::vector<double> extra;
  if (signal.mixture)
    for (const auto& c : signal.mixture->components) extra.push_back(c.bias_point - theta0);
  const detail::Frame fr = detail::frame_for(logf, prior, x0, signal.noise.scale, extra);

  auto w = [&](double u) { return std::exp(logf(u) - fr.peak_log); };
  const auto j0 = quad::integrate(w, fr.lo, fr.hi, fr.breakpoints,
                                  detail::options(cfg, cfg.abs_tol, fr.scale));
  // J1 can vanish by symmetry, so its tolerance is absolute on the mean.
  const double j1_tol =
      std::max(cfg.abs_tol, cfg.rel_tol * j0.value * (std::abs(x0) + fr.scale));
  const auto j1 = quad::integrate([&](double u) { return u * w(u); }, fr.lo, fr.hi,
                                  fr.breakpoints, detail::options(cfg, j1_tol, fr.scale));
  if (!(j0.value > 0))
    fail(ErrorKind::Convergence, "quadrature: posterior normaliser vanished");

  const Combo combo = signal.mixture ? Combo::Mixture
                      : signal.bias != 0.0 ? Combo::Biased
                                           : combo_of(prior.family, signal.noise.family);
  return make_result(theta0, theta0 + j1.value / j0.value, Method::Quadrature, combo);
}

/// log of the marginal density m(y) = integral f(theta) l(y - theta) dtheta.
inline double quad_log_marginal(const Distribution& prior, const Distribution& noise, double y,
                                const QuadratureConfig& cfg = {}) {
  validate(prior);
  validate_noise(noise);
  const SignalModel s{noise, 0.0, std::nullopt};
  const detail::LogPosterior logf{prior, s, y};
  const detail::Frame fr = detail::frame_for(logf, prior, y - prior.location, noise.scale, {});
  const auto j0 = quad::integrate([&](double u) { return std::exp(logf(u) - fr.peak_log); },
                                  fr.lo, fr.hi, fr.breakpoints,
                                  detail::options(cfg, cfg.abs_tol, fr.scale));
  return fr.peak_log + std::log(j0.value);
}

/// Integral of g(u) * pi(u) where pi is prior(theta0 + u) * l(-u) normalised,
/// i.e. an expectation under the pseudo-posterior at x = theta0.
inline double pseudo_posterior_expectation(const Distribution& prior, const Distribution& noise,
                                           const std::function<double(double)>& g,
                                           const QuadratureConfig& cfg = {}) {
  const SignalModel s{noise, 0.0, std::nullopt};
  const detail::LogPosterior logf{prior, s, prior.location};
  const detail::Frame fr = detail::frame_for(logf, prior, 0.0, noise.scale, {});
  auto w = [&](double u) { return std::exp(logf(u) - fr.peak_log); };
  const auto z = quad::integrate(w, fr.lo, fr.hi, fr.breakpoints,
                                 detail::options(cfg, cfg.abs_tol, fr.scale));
  const auto num = quad::integrate([&](double u) { return g(u) * w(u); }, fr.lo, fr.hi,
                                   fr.breakpoints,
                                   detail::options(cfg, cfg.abs_tol * z.value, fr.scale));
  return num.value / z.value;
}

/// Central difference (f(x0 + h) - f(x0 - h)) / (2h).
template <class F>
double fd_slope(const F& f, double x0, double h) {
  if (!(h > 0)) fail(ErrorKind::Validation, "fd_slope: step must be > 0");
  const double hi = f(x0 + h), lo = f(x0 - h);
  if (!std::isfinite(hi) || !std::isfinite(lo))
    fail(ErrorKind::Domain, "fd_slope: non-finite function value");
  return (hi - lo) / (2.0 * h);
}

}  // namespace bayesop::oracle
