#pragma once

// Properties of the shift functions: small-signal slopes, large-signal laws,
// regime classification, backfire and mixture intervals, scalar Kalman filter.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bayesop/distributions.hpp"
#include "bayesop/oracle.hpp"
#include "bayesop/posterior.hpp"
#include "bayesop/result.hpp"
#include "bayesop/specfun.hpp"

namespace bayesop {

enum class Regime { DeGroot, BoundedConfidence, BoundedShift, Overreaction, Backfire };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::DeGroot: return "degroot";
    case Regime::BoundedConfidence: return "bounded_confidence";
    case Regime::BoundedShift: return "bounded_shift";
    case Regime::Overreaction: return "overreaction";
    case Regime::Backfire: return "backfire";
  }
  return "unknown";
}

struct RegimeReport {
  Regime regime = Regime::DeGroot;
  double omega = 0.0;
  std::optional<double> tau;
  std::optional<double> x_star;
  std::optional<std::pair<double, double>> backfire_interval;
  std::optional<double> fixed_shift;  // |limit of the shift| for bounded shift
  bool backfire = false;              // set when the signal carries a bias
  std::string asymptote;              // leading large-signal law, as text
  Combo combo = Combo::Other;
};

struct KalmanState {
  double theta = 0.0;
  double v = 0.0;
  double gain = 0.0;
};

namespace detail {

inline void check_scales(double s0, double se) {
  if (!(s0 > 0) || !(se > 0) || !std::isfinite(s0) || !std::isfinite(se))
    fail(ErrorKind::Validation, "scales must be finite and > 0");
}

// Root of f on [lo, hi] given f(lo), f(hi) of opposite sign.
template <class F>
double bisect(const F& f, double lo, double hi, double tol) {
  double flo = f(lo);
  for (int it = 0; it < 200 && std::abs(hi - lo) > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) lo = mid, flo = fm;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double closed_shift(Combo c, double d, double s0, double se) {
  if (auto h = closed::shift(c, d, s0, se)) return *h;
  const Distribution prior{prior_family(c), 0.0, s0};
  const SignalModel sig{{noise_family(c), 0.0, se}, 0.0, std::nullopt};
  return oracle::quad_posterior_mean(prior, sig, d).shift;
}

}  // namespace detail

/// omega = E[(theta - theta0) s_l(theta0; theta)] under the pseudo-posterior
/// prior(theta) l(theta0 - theta).
inline double local_weight(const Distribution& prior, const Distribution& noise,
                           const oracle::QuadratureConfig& cfg = {}) {
  validate(prior);
  if (noise.family == Family::BoundedUniform)
    fail(ErrorKind::Unsupported, "local_weight: bounded uniform noise is not supported");
  validate_noise(noise);
  const double theta0 = prior.location;
  return oracle::pseudo_posterior_expectation(
      prior, noise,
      [&](double u) { return u == 0.0 ? 0.0 : u * local_score(noise, theta0, theta0 + u); }, cfg);
}

/// Exact small-signal slope of the shift function for one of the nine pairs.
inline double degroot_coefficient(Combo combo, double s0, double se) {
  detail::check_scales(s0, se);
  constexpr double pi = std::numbers::pi;
  switch (combo) {
    case Combo::GaussianGaussian: return s0 * s0 / (s0 * s0 + se * se);
    case Combo::LaplaceLaplace: return s0 / (s0 + se);
    case Combo::CauchyCauchy: return s0 / (s0 + se);
    case Combo::GaussianCauchy: {
      const double a = se / s0;
      return 1.0 + a * a -
             std::sqrt(2.0 / pi) * a / specfun::erfcx_real(a / std::numbers::sqrt2);
    }
    case Combo::LaplaceCauchy: {
      const double a = se / s0;
      const double s = std::sin(a), c = std::cos(a);
      const double Si = specfun::si(a), Ci = specfun::ci(a);
      const double num = 0.5 * pi * s - c * Ci - s * Si;
      const double den = 0.5 * pi * c - c * Si + s * Ci;
      return 1.0 - a * num / den;
    }
    case Combo::GaussianLaplace: {
      const double a = std::numbers::sqrt2 * s0 / se;
      return 0.5 * a * (2.0 / (closed::kSqrtPi * specfun::erfcx_real(0.5 * a)) - a);
    }
    case Combo::LaplaceGaussian: return 1.0 - degroot_coefficient(Combo::GaussianLaplace, se, s0);
    case Combo::CauchyGaussian: return 1.0 - degroot_coefficient(Combo::GaussianCauchy, se, s0);
    case Combo::CauchyLaplace: return 1.0 - degroot_coefficient(Combo::LaplaceCauchy, se, s0);
    default: break;
  }
  fail(ErrorKind::Unsupported, std::string("degroot_coefficient: no formula for ") +
                                   to_string(combo));
}

/// Slope at x = theta0 + b of a mixture posterior: alpha(theta0 + b) times the
/// non-mixture slope (the alpha' term multiplies a zero shift there).
inline double mixture_degroot_coefficient(const Distribution& prior, const SignalModel& signal) {
  validate(prior);
  validate(signal);
  const Combo c = combo_of(prior.family, signal.noise.family);
  const double nm = c == Combo::Other ? local_weight(prior, signal.noise)
                                      : degroot_coefficient(c, prior.scale, signal.noise.scale);
  return nm * mixture_alpha(prior, signal, prior.location + signal.bias);
}

/// Gaussian prior with Gaussian mixture components:
///   omega_nm / (1 + sum (phi_i/phi_eps) sqrt(s0^2 + se^2)/s_i exp(-D_i^2 / (2 s_i^2)))
/// with D_i the bias point measured from theta0.
inline double gaussian_mixture_degroot_coefficient(double s0, double se, const Mixture& m,
                                                   double theta0 = 0.0) {
  detail::check_scales(s0, se);
  if (!(m.eps_weight > 0)) fail(ErrorKind::Validation, "mixture: state-centred weight is 0");
  double sum = 0.0;
  for (const auto& c : m.components) {
    if (c.family != Family::Gaussian)
      fail(ErrorKind::Dispatch, "gaussian_mixture_degroot_coefficient: components must be Gaussian");
    const double D = c.bias_point - theta0;
    sum += c.weight / m.eps_weight * std::sqrt(s0 * s0 + se * se) / c.scale *
           std::exp(-D * D / (2.0 * c.scale * c.scale));
  }
  return degroot_coefficient(Combo::GaussianGaussian, s0, se) / (1.0 + sum);
}

enum class CoefficientModel { GaussianCauchy, LaplaceCauchy, GaussianLaplace, KalmanSteadyState };

/// Noisy: signal scale much larger than prior scale. Accurate: the reverse.
enum class ApproxRegime { Noisy, Accurate };

/// The ratio a each approximation is written in.
inline double approx_parameter(CoefficientModel m, double s0, double se) {
  return m == CoefficientModel::GaussianLaplace ? std::numbers::sqrt2 * s0 / se : se / s0;
}

inline double coefficient_approx(CoefficientModel m, ApproxRegime r, double s0, double se) {
  detail::check_scales(s0, se);
  const double a = approx_parameter(m, s0, se);
  const bool noisy = r == ApproxRegime::Noisy;
  switch (m) {
    case CoefficientModel::GaussianCauchy:
      return noisy ? 2.0 / (a * a) : 1.0 - std::sqrt(2.0 / std::numbers::pi) * a;
    case CoefficientModel::LaplaceCauchy:
      return noisy ? 4.0 / (a * a) : 1.0 + (2.0 / std::numbers::pi) * a * std::log(a);
    case CoefficientModel::GaussianLaplace:
      // here a = sqrt(2) s0/se, so noisy signals mean a << 1
      return noisy ? a / closed::kSqrtPi : 1.0 - 4.0 / (a * a);
    case CoefficientModel::KalmanSteadyState:
      return noisy ? s0 / (s0 + se) : s0 * s0 / (s0 * s0 + se * se);
  }
  return 0.0;
}

struct AsymptoticShift {
  double value = 0.0;
  bool in_regime = true;  // false when |x - theta0| is not large against the scales
};

/// Leading-order shift for large |x - theta0|. For a bounded uniform prior the
/// scale is the half-width delta and the law is (delta^2/3) s_a(theta0; x).
inline AsymptoticShift asymptotic_shift(Family prior_family_, Family noise_family_, double s0,
                                        double se, double theta0, double x) {
  detail::check_scales(s0, se);
  const double d = x - theta0;
  const double sg = d < 0 ? -1.0 : 1.0;
  AsymptoticShift out;
  out.in_regime = std::abs(d) >= 10.0 * std::max(s0, se);
  if (prior_family_ == Family::BoundedUniform) {
    out.value = s0 * s0 / 3.0 * asymptotic_score({noise_family_, 0.0, se}, theta0, x);
    out.in_regime = s0 < se;
    return out;
  }
  const Combo c = combo_of(prior_family_, noise_family_);
  if (d == 0.0 && c != Combo::GaussianGaussian && c != Combo::CauchyCauchy &&
      !(c == Combo::LaplaceLaplace && closed::same_scale(s0, se)))
    fail(ErrorKind::Domain, "asymptotic_shift: undefined at x = theta0");
  switch (c) {
    case Combo::GaussianGaussian:
    case Combo::CauchyCauchy: out.value = degroot_coefficient(c, s0, se) * d; break;
    // 2 Var(prior) / d: the Laplace prior has variance 2 s0^2
    case Combo::GaussianCauchy: out.value = 2.0 * s0 * s0 / d; break;
    case Combo::LaplaceCauchy: out.value = 4.0 * s0 * s0 / d; break;
    case Combo::GaussianLaplace: out.value = sg * s0 * s0 / se; break;
    case Combo::LaplaceGaussian: out.value = d - sg * se * se / s0; break;
    case Combo::CauchyGaussian: out.value = d - 2.0 * se * se / d; break;
    case Combo::CauchyLaplace: out.value = d - 4.0 * se * se / d; break;
    case Combo::LaplaceLaplace: {
      if (closed::same_scale(s0, se)) {
        out.value = 0.5 * d;
        break;
      }
      const double a0 = 1.0 / s0, ae = 1.0 / se;
      const double x_star = 2.0 * a0 / (ae * ae - a0 * a0);
      out.value = s0 > se ? d - sg * x_star : -sg * (s0 / se) * x_star;
      break;
    }
    default: fail(ErrorKind::Unsupported, "asymptotic_shift: unsupported pair");
  }
  return out;
}

/// Signals x for which a bias Delta makes the shift point away from x:
/// (theta0, theta0 + Delta) for Delta > 0, mirrored for Delta < 0. The far
/// end is located by bisection on the biased shift except for Gaussian pairs.
inline std::optional<std::pair<double, double>> backfire_region(Combo combo, double delta,
                                                                double theta0, double s0,
                                                                double se) {
  detail::check_scales(s0, se);
  if (delta == 0.0) return std::nullopt;
  if (combo == Combo::GaussianGaussian)
    return delta > 0 ? std::pair{theta0, theta0 + delta} : std::pair{theta0 + delta, theta0};
  const double sg = delta > 0 ? 1.0 : -1.0;
  auto h = [&](double x) { return detail::closed_shift(combo, x - delta - theta0, s0, se); };
  // h(theta0) opposes (x - theta0) just past theta0 when backfire exists.
  const double start = theta0;
  if (!(h(start) * sg < 0)) return std::nullopt;
  double hi = theta0 + delta;
  for (int i = 0; i < 60 && h(hi) * sg < 0; ++i) hi = theta0 + (hi - theta0) * 2.0;
  if (h(hi) * sg < 0) return std::nullopt;
  const double root = detail::bisect(h, start, hi, 1e-10 * s0);
  return delta > 0 ? std::pair{theta0, root} : std::pair{root, theta0};
}

/// Interval where a Gaussian bias component at Delta_i dominates the marginal,
/// theta0 + D (1 -+ sqrt s)/(1 - s) with s = s_i^2/(s0^2 + se^2), D = Delta_i - theta0.
inline std::optional<std::pair<double, double>> mixture_intermediate_regime(
    double delta_i, double s0, double se, double s_i, double theta0 = 0.0) {
  detail::check_scales(s0, se);
  detail::check_scales(s_i, s_i);
  const double s = s_i * s_i / (s0 * s0 + se * se);
  if (s >= 1.0) return std::nullopt;
  const double D = delta_i - theta0;
  const double p = theta0 + D * (1.0 - std::sqrt(s)) / (1.0 - s);
  const double q = theta0 + D * (1.0 + std::sqrt(s)) / (1.0 - s);
  return std::pair{std::min(p, q), std::max(p, q)};
}

/// One predict/update step; the gain uses the variance carried in.
inline KalmanState kalman_step(const KalmanState& st, double x, double s0, double se) {
  detail::check_scales(s0, se);
  if (!(st.v >= 0) || !std::isfinite(st.v)) fail(ErrorKind::Validation, "kalman: v must be >= 0");
  const double pred = st.v + s0 * s0;
  const double gain = pred / (pred + se * se);
  return {st.theta + gain * (x - st.theta), (1.0 - gain) * pred, gain};
}

inline double kalman_steady_gain(double s0, double se) {
  detail::check_scales(s0, se);
  const double r = se / s0;
  const double root = std::sqrt(1.0 + 4.0 * r * r);
  return (1.0 + root) / (1.0 + root + 2.0 * r * r);
}

inline double kalman_steady_variance(double s0, double se) {
  detail::check_scales(s0, se);
  const double r = se / s0;
  return 0.5 * s0 * s0 * (std::sqrt(1.0 + 4.0 * r * r) - 1.0);
}

namespace detail {

// |d| where the shift drops to half of the DeGroot line omega d.
inline double half_line_distance(Combo c, double omega, double s0, double se) {
  auto ratio = [&](double d) { return closed_shift(c, d, s0, se) / (omega * d) - 0.5; };
  double lo = 1e-3 * s0, hi = std::max(s0, se);
  for (int i = 0; i < 80 && ratio(hi) > 0; ++i) lo = hi, hi *= 2.0;
  return bisect(ratio, lo, hi, 1e-10 * s0);
}

inline const char* asymptote_text(Combo c, double s0, double se) {
  switch (c) {
    case Combo::GaussianGaussian:
    case Combo::CauchyCauchy: return "omega*(x-theta0)";
    case Combo::GaussianCauchy: return "2*s0^2/(x-theta0)";
    case Combo::LaplaceCauchy: return "4*s0^2/(x-theta0)";
    case Combo::GaussianLaplace: return "sgn(x-theta0)*s0^2/se";
    case Combo::LaplaceGaussian: return "(x-theta0)-sgn(x-theta0)*se^2/s0";
    case Combo::CauchyGaussian: return "(x-theta0)-2*se^2/(x-theta0)";
    case Combo::CauchyLaplace: return "(x-theta0)-4*se^2/(x-theta0)";
    case Combo::LaplaceLaplace:
      if (closed::same_scale(s0, se)) return "(x-theta0)/2";
      return s0 > se ? "(x-theta0)-sgn(x-theta0)*x_star" : "-sgn(x-theta0)*(s0/se)*x_star";
    default: break;
  }
  return "";
}

}  // namespace detail

/// Regime of the shift function for a prior/signal pair. A non-zero bias keeps
/// the unbiased regime and adds the backfire flag and interval.
inline RegimeReport classify_regime(Family prior_fam, Family signal_fam, double s0, double se,
                                    double bias = 0.0) {
  detail::check_scales(s0, se);
  if (signal_fam == Family::BoundedUniform)
    fail(ErrorKind::Unsupported, "classify_regime: bounded uniform noise is not supported");
  if (!std::isfinite(bias)) fail(ErrorKind::Validation, "bias must be finite");
  RegimeReport rep;
  rep.combo = combo_of(prior_fam, signal_fam);

  if (prior_fam == Family::BoundedUniform) {
    // large-signal law (delta^2/3) s_a follows the noise score
    rep.omega = local_weight({prior_fam, 0.0, s0}, {signal_fam, 0.0, se});
    rep.asymptote = "(delta^2/3)*s_a(theta0;x)";
    if (signal_fam == Family::Gaussian) rep.regime = Regime::DeGroot;
    else if (signal_fam == Family::Cauchy) rep.regime = Regime::BoundedConfidence;
    else {
      rep.regime = Regime::BoundedShift;
      rep.fixed_shift = s0 * s0 / (3.0 * se);
      rep.tau = *rep.fixed_shift / rep.omega;
    }
  } else {
    const Combo c = rep.combo;
    rep.omega = degroot_coefficient(c, s0, se);
    rep.asymptote = detail::asymptote_text(c, s0, se);
    switch (c) {
      case Combo::GaussianGaussian:
      case Combo::CauchyCauchy: rep.regime = Regime::DeGroot; break;
      case Combo::GaussianCauchy:
      case Combo::LaplaceCauchy:
        rep.regime = Regime::BoundedConfidence;
        rep.tau = detail::half_line_distance(c, rep.omega, s0, se);
        break;
      case Combo::GaussianLaplace:
        rep.regime = Regime::BoundedShift;
        rep.fixed_shift = s0 * s0 / se;
        rep.tau = *rep.fixed_shift / rep.omega;
        break;
      case Combo::LaplaceGaussian:
      case Combo::CauchyGaussian:
      case Combo::CauchyLaplace: rep.regime = Regime::Overreaction; break;
      case Combo::LaplaceLaplace:
        if (closed::same_scale(s0, se)) {
          rep.regime = Regime::DeGroot;
          rep.omega = 0.5;
          break;
        }
        rep.x_star = 2.0 / s0 / (1.0 / (se * se) - 1.0 / (s0 * s0));
        if (s0 > se) {
          rep.regime = Regime::Overreaction;
        } else {
          rep.regime = Regime::BoundedShift;
          rep.fixed_shift = std::abs(s0 / se * *rep.x_star);
          rep.tau = *rep.fixed_shift / rep.omega;
        }
        break;
      default: break;
    }
  }

  if (bias != 0.0) {
    rep.backfire = true;
    if (prior_fam != Family::BoundedUniform)
      rep.backfire_interval = backfire_region(rep.combo, bias, 0.0, s0, se);
  }
  return rep;
}

}  // namespace bayesop
