#pragma once

// Scaled special functions used by the closed-form posterior means.
//
//   erfcx(z) = exp(z^2) erfc(z)
//   e1_scaled(w) = exp(w) E1(w)
//   eix(z) = exp(-z) Ei(z)
//
// Everything is evaluated in scaled form so that callers never see the
// exp(z^2) or exp(x) prefactors.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "bayesop/errors.hpp"

namespace bayesop::specfun {

using Complex = std::complex<double>;

namespace detail {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrtPi = 1.772453850905516027298167483341;
inline constexpr double kEulerGamma = std::numbers::egamma;
inline constexpr double kEps = 1e-17;
inline constexpr double kTiny = 1e-300;

inline void require_finite(Complex z, const char* fn) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    fail(ErrorKind::Domain, std::string(fn) + ": non-finite argument");
}

// erf by its Maclaurin series, then erfcx = exp(z^2)(1 - erf z).
// Used for Re z < 1, |z| <= 8 where the continued fraction is slow.
inline Complex erfcx_taylor(Complex z) {
  const Complex z2 = z * z;
  Complex term = z;
  Complex sum = z;
  for (int n = 1; n < 1000; ++n) {
    term *= -z2 / double(n);
    const Complex t = term / double(2 * n + 1);
    sum += t;
    if (std::abs(t) < kEps * std::abs(sum)) break;
  }
  const Complex erf = (2.0 / kSqrtPi) * sum;
  return std::exp(z2) * (1.0 - erf);
}

// Laplace continued fraction
//   erfcx(z) = 1/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
// evaluated with the modified Lentz algorithm.
inline Complex erfcx_continued_fraction(Complex z) {
  Complex f = z;
  if (f == 0.0) f = kTiny;
  Complex c = f;
  Complex d = 0.0;
  for (int n = 1; n < 20000; ++n) {
    const double an = 0.5 * n;
    d = z + an * d;
    if (d == 0.0) d = kTiny;
    c = z + an / c;
    if (c == 0.0) c = kTiny;
    d = 1.0 / d;
    const Complex delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return 1.0 / (kSqrtPi * f);
  }
  throw ConvergenceError("erfcx: continued fraction did not converge", 0.0);
}

// E1(w) = -gamma - log w - sum_{k>=1} (-w)^k / (k k!)
inline Complex e1_scaled_series(Complex w) {
  Complex term = 1.0;
  Complex sum = 0.0;
  for (int k = 1; k < 1000; ++k) {
    term *= -w / double(k);
    const Complex t = term / double(k);
    sum += t;
    if (std::abs(t) < kEps * std::abs(sum)) break;
  }
  return std::exp(w) * (-kEulerGamma - std::log(w) - sum);
}

// exp(w) E1(w) = 1/(w+1 - 1/(w+3 - 4/(w+5 - 9/(...))))
inline Complex e1_scaled_continued_fraction(Complex w) {
  Complex f = w + 1.0;
  if (f == 0.0) f = kTiny;
  Complex c = f;
  Complex d = 0.0;
  for (int n = 1; n < 20000; ++n) {
    const double an = -double(n) * double(n);
    const Complex bn = w + double(2 * n + 1);
    d = bn + an * d;
    if (d == 0.0) d = kTiny;
    c = bn + an / c;
    if (c == 0.0) c = kTiny;
    d = 1.0 / d;
    const Complex delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return 1.0 / f;
  }
  throw ConvergenceError("e1_scaled: continued fraction did not converge", 0.0);
}

// Optimally truncated sum_k (-1)^k k!/w^(k+1) plus the Stokes term that
// appears across the negative real axis.
inline Complex e1_scaled_asymptotic(Complex w) {
  Complex term = 1.0 / w;
  Complex sum = term;
  for (int k = 1; k < 1000; ++k) {
    const Complex next = term * (-double(k)) / w;
    if (std::abs(next) >= std::abs(term) || std::abs(next) < kEps * std::abs(sum))
      break;
    term = next;
    sum += term;
  }
  if (w.imag() < 0) sum += Complex(0.0, kPi) * std::exp(w);
  else if (w.imag() > 0) sum -= Complex(0.0, kPi) * std::exp(w);
  return sum;
}

}  // namespace detail

/// exp(z^2) erfc(z). Accurate to ~1e-14 relative for Re z >= 0; the left
/// half-plane goes through erfcx(z) = 2 exp(z^2) - erfcx(-z).
inline Complex erfcx(Complex z) {
  detail::require_finite(z, "erfcx");
  if (z.real() < 0) return 2.0 * std::exp(z * z) - erfcx(-z);
  if (z.real() < 1.0 && std::abs(z) <= 8.0) return detail::erfcx_taylor(z);
  return detail::erfcx_continued_fraction(z);
}

inline double erfcx_real(double x) {
  if (!std::isfinite(x)) fail(ErrorKind::Domain, "erfcx_real: non-finite argument");
  if (x < 0) return 2.0 * std::exp(x * x) - erfcx_real(-x);
  return erfcx(Complex(x, 0.0)).real();
}

inline double erfc(double x) {
  if (!std::isfinite(x)) fail(ErrorKind::Domain, "erfc: non-finite argument");
  return std::erfc(x);
}

/// exp(w) E1(w) on the principal branch (cut along the negative real axis).
inline Complex e1_scaled(Complex w) {
  detail::require_finite(w, "e1_scaled");
  if (w == 0.0) fail(ErrorKind::Pole, "e1_scaled: pole at w = 0");
  const double r = std::abs(w);
  if (r <= 2.0) return detail::e1_scaled_series(w);
  if (w.real() < 0 && r + w.real() <= 7.0) {
    if (r <= 40.0) return detail::e1_scaled_series(w);
    return detail::e1_scaled_asymptotic(w);
  }
  return detail::e1_scaled_continued_fraction(w);
}

/// exp(-z) Ei(z) with Ei(z) = -E1(-z) + i pi sgn(Im z). On the real axis
/// this is the real-valued (principal value) Ei.
inline Complex eix(Complex z) {
  detail::require_finite(z, "eix");
  if (z == 0.0) fail(ErrorKind::Pole, "eix: pole at z = 0");
  if (z.imag() == 0.0) {
    return {-e1_scaled(Complex(-z.real(), 0.0)).real(), 0.0};
  }
  const double sgn = z.imag() > 0 ? 1.0 : -1.0;
  return -e1_scaled(-z) + Complex(0.0, sgn * detail::kPi) * std::exp(-z);
}

/// Si(a) = integral_0^a sin t / t dt.
inline double si(double a) {
  if (!std::isfinite(a)) fail(ErrorKind::Domain, "si: non-finite argument");
  if (a < 0) return -si(-a);
  if (a <= 4.0) {
    const double a2 = a * a;
    double term = a;
    double sum = a;
    for (int n = 1; n < 200; ++n) {
      term *= -a2 / double((2 * n) * (2 * n + 1));
      const double t = term / double(2 * n + 1);
      sum += t;
      if (std::abs(t) < detail::kEps * std::abs(sum)) break;
    }
    return sum;
  }
  const Complex ia(0.0, a);
  const Complex e1 = std::exp(-ia) * e1_scaled(ia);
  return detail::kPi / 2 + e1.imag();
}

/// Ci(a) = gamma + log a + integral_0^a (cos t - 1)/t dt, a > 0.
inline double ci(double a) {
  if (!std::isfinite(a)) fail(ErrorKind::Domain, "ci: non-finite argument");
  if (a == 0.0) fail(ErrorKind::Pole, "ci: logarithmic singularity at 0");
  if (a < 0) fail(ErrorKind::Domain, "ci: requires a > 0");
  if (a <= 4.0) {
    const double a2 = a * a;
    double term = 1.0;
    double sum = 0.0;
    for (int n = 1; n < 200; ++n) {
      term *= -a2 / double((2 * n - 1) * (2 * n));
      const double t = term / double(2 * n);
      sum += t;
      if (std::abs(t) < detail::kEps * std::abs(sum)) break;
    }
    return detail::kEulerGamma + std::log(a) + sum;
  }
  const Complex ia(0.0, a);
  const Complex e1 = std::exp(-ia) * e1_scaled(ia);
  return -e1.real();
}

}  // namespace bayesop::specfun
