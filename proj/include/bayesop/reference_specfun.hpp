#pragma once

// Slow 100-digit references for the special functions. Independent of the
// production kernels: different expansions, different branch bookkeeping.

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <complex>

#include "bayesop/errors.hpp"

namespace bayesop::oracle {

enum class SpecialFunction { Erfcx, Eix, Si, Ci };

namespace ref {

using Real = boost::multiprecision::cpp_bin_float_100;
using Cplx = boost::multiprecision::cpp_complex_100;

inline const Real& eps() {
  static const Real e = Real(1e-60);
  return e;
}

// exp(z^2) erfc(z) from the erf Maclaurin series (|z| <= 7).
inline Cplx erfcx_series(const Cplx& z) {
  const Cplx z2 = z * z;
  Cplx term = z, sum = z;
  for (int n = 1; n < 5000; ++n) {
    term *= -z2 / n;
    const Cplx t = term / (2 * n + 1);
    sum += t;
    if (abs(t) < eps() * abs(sum) && n > 4) break;
  }
  const Real two_over_sqrt_pi = 2 / sqrt(boost::math::constants::pi<Real>());
  return exp(z2) * (Cplx(1) - two_over_sqrt_pi * sum);
}

// 1/(z sqrt(pi)) sum (-1)^n (2n-1)!! / (2 z^2)^n, truncated at its smallest term.
inline Cplx erfcx_asymptotic(const Cplx& z) {
  const Cplx inv = Cplx(1) / (2 * z * z);
  Cplx term = 1, sum = 1;
  for (int n = 1; n < 5000; ++n) {
    const Cplx next = -term * Real(2 * n - 1) * inv;
    if (abs(next) >= abs(term)) break;
    term = next;
    sum += term;
    if (abs(term) < eps() * abs(sum)) break;
  }
  return sum / (z * sqrt(boost::math::constants::pi<Real>()));
}

inline Cplx erfcx(const Cplx& z) {
  if (real(z) < 0) return 2 * exp(z * z) - erfcx(-z);
  if (abs(z) <= 7) return erfcx_series(z);
  return erfcx_asymptotic(z);
}

// Ei(z) = gamma + log z + sum z^k/(k k!), principal log.
inline Cplx ei(const Cplx& z) {
  Cplx term = 1, sum = 0;
  for (int k = 1; k < 20000; ++k) {
    term *= z / k;
    const Cplx t = term / k;
    sum += t;
    if (abs(t) < eps() * abs(sum) && k > 4) break;
  }
  return boost::math::constants::euler<Real>() + log(z) + sum;
}

inline Real si(const Real& a) {
  const Real a2 = a * a;
  Real term = a, sum = a;
  for (int n = 1; n < 5000; ++n) {
    term *= -a2 / ((2 * n) * (2 * n + 1));
    const Real t = term / (2 * n + 1);
    sum += t;
    if (abs(t) < eps() * abs(sum)) break;
  }
  return sum;
}

inline Real ci(const Real& a) {
  const Real a2 = a * a;
  Real term = 1, sum = 0;
  for (int n = 1; n < 5000; ++n) {
    term *= -a2 / ((2 * n - 1) * (2 * n));
    const Real t = term / (2 * n);
    sum += t;
    if (abs(t) < eps() * abs(sum) && n > 2) break;
  }
  return boost::math::constants::euler<Real>() + log(a) + sum;
}

}  // namespace ref

/// High-precision reference value. Si and Ci take the real part of z.
/// Domains: erfcx any finite z; eix 0 < |z| <= 60; si |a| <= 100; ci 0 < a <= 100.
inline std::complex<double> reference_specfun(SpecialFunction kind, std::complex<double> z) {
  using ref::Cplx;
  using ref::Real;
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    fail(ErrorKind::Domain, "reference_specfun: non-finite argument");
  const Cplx w(Real(z.real()), Real(z.imag()));
  switch (kind) {
    case SpecialFunction::Erfcx: {
      const Cplx v = ref::erfcx(w);
      return {static_cast<double>(real(v)), static_cast<double>(imag(v))};
    }
    case SpecialFunction::Eix: {
      if (z == 0.0) fail(ErrorKind::Pole, "reference eix: pole at 0");
      if (std::abs(z) > 60.0) fail(ErrorKind::Convergence, "reference eix: |z| > 60 unsupported");
      const Cplx v = exp(-w) * ref::ei(w);
      if (z.imag() == 0.0) return {static_cast<double>(real(v)), 0.0};
      return {static_cast<double>(real(v)), static_cast<double>(imag(v))};
    }
    case SpecialFunction::Si: {
      if (std::abs(z.real()) > 100.0)
        fail(ErrorKind::Convergence, "reference si: |a| > 100 unsupported");
      return {static_cast<double>(ref::si(real(w))), 0.0};
    }
    case SpecialFunction::Ci: {
      if (z.real() == 0.0) fail(ErrorKind::Pole, "reference ci: pole at 0");
      if (z.real() < 0.0 || z.real() > 100.0)
        fail(ErrorKind::Convergence, "reference ci: requires 0 < a <= 100");
      return {static_cast<double>(ref::ci(real(w))), 0.0};
    }
  }
  return {};
}

}  // namespace bayesop::oracle
