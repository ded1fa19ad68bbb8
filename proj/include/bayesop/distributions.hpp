#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bayesop/errors.hpp"

namespace bayesop {

enum class Family { Gaussian, Laplace, Cauchy, BoundedUniform };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::Laplace: return "laplace";
    case Family::Cauchy: return "cauchy";
    case Family::BoundedUniform: return "uniform";
  }
  return "unknown";
}

/// Accepts the lower-case names produced by to_string plus a few short forms.
inline Family parse_family(std::string_view s) {
  if (s == "gaussian" || s == "normal" || s == "g") return Family::Gaussian;
  if (s == "laplace" || s == "l") return Family::Laplace;
  if (s == "cauchy" || s == "c") return Family::Cauchy;
  if (s == "uniform" || s == "bounded_uniform" || s == "u") return Family::BoundedUniform;
  fail(ErrorKind::Validation, "unknown distribution family '" + std::string(s) + "'");
}

/// Symmetric location-scale law. For BoundedUniform, `scale` is the
/// half-width of the support.
struct Distribution {
  Family family = Family::Gaussian;
  double location = 0.0;
  double scale = 1.0;
};

struct MixtureComponent {
  double weight = 0.0;      // phi_i
  double bias_point = 0.0;  // Delta_i, a fixed signal value independent of the state
  Family family = Family::Gaussian;
  double scale = 1.0;       // sigma_i
};

struct Mixture {
  double eps_weight = 1.0;  // phi_eps, weight of the state-centered component
  std::vector<MixtureComponent> components;
};

struct SignalModel {
  Distribution noise;  // location must be 0
  double bias = 0.0;
  std::optional<Mixture> mixture;
};

inline void validate(const Distribution& d) {
  if (!std::isfinite(d.location))
    fail(ErrorKind::Validation, "distribution location must be finite");
  if (!(d.scale > 0.0) || !std::isfinite(d.scale))
    fail(ErrorKind::Validation, "distribution scale must be finite and > 0");
}

inline void validate_noise(const Distribution& d) {
  validate(d);
  if (d.family == Family::BoundedUniform)
    fail(ErrorKind::Validation, "bounded uniform is only supported as a prior");
  if (d.location != 0.0)
    fail(ErrorKind::Validation, "signal noise must have location 0");
}

inline void validate(const SignalModel& s) {
  validate_noise(s.noise);
  if (!std::isfinite(s.bias)) fail(ErrorKind::Validation, "signal bias must be finite");
  if (!s.mixture) return;
  const Mixture& m = *s.mixture;
  double total = m.eps_weight;
  if (!(m.eps_weight >= 0.0 && m.eps_weight <= 1.0))
    fail(ErrorKind::Validation, "mixture weights must lie in [0, 1]");
  for (const auto& c : m.components) {
    if (!(c.weight >= 0.0 && c.weight <= 1.0))
      fail(ErrorKind::Validation, "mixture weights must lie in [0, 1]");
    if (!std::isfinite(c.bias_point))
      fail(ErrorKind::Validation, "mixture bias point must be finite");
    validate_noise(Distribution{c.family, 0.0, c.scale});
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    fail(ErrorKind::Validation, "mixture weights must sum to 1");
}

/// Log density; -inf outside the support of a bounded uniform.
inline double log_pdf(const Distribution& d, double t) {
  const double s = d.scale;
  const double u = (t - d.location) / s;
  switch (d.family) {
    case Family::Gaussian:
      return -0.5 * u * u - std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi);
    case Family::Laplace:
      return -std::abs(u) - std::log(2.0 * s);
    case Family::Cauchy:
      return -std::log1p(u * u) - std::log(std::numbers::pi * s);
    case Family::BoundedUniform:
      return std::abs(u) <= 1.0 ? -std::log(2.0 * s)
                                : -std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double pdf(const Distribution& d, double t) { return std::exp(log_pdf(d, t)); }

namespace detail {

// Derivative of log l(t) for a zero-centred noise density.
inline double dlog_noise(const Distribution& noise, double t, const char* what) {
  const double s = noise.scale;
  switch (noise.family) {
    case Family::Gaussian: return -t / (s * s);
    case Family::Laplace:
      if (t == 0.0)
        fail(ErrorKind::NonDifferentiable,
             std::string(what) + ": Laplace log-density has a kink at the location");
      return t > 0 ? -1.0 / s : 1.0 / s;
    case Family::Cauchy: return -2.0 * t / (t * t + s * s);
    case Family::BoundedUniform: break;
  }
  fail(ErrorKind::Unsupported, std::string(what) + ": not defined for bounded uniform noise");
}

}  // namespace detail

/// d/dx log l(x - theta) at x = theta0.
inline double local_score(const Distribution& noise, double theta0, double theta) {
  return detail::dlog_noise(noise, theta0 - theta, "local_score");
}

/// d/dtheta log l(x - theta) at theta = theta0.
inline double asymptotic_score(const Distribution& noise, double theta0, double x) {
  return -detail::dlog_noise(noise, x - theta0, "asymptotic_score");
}

}  // namespace bayesop
