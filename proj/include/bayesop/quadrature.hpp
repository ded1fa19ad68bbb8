#pragma once

// Globally adaptive 21-point Gauss-Kronrod integration over a real line
// split at user breakpoints. Infinite end segments are mapped onto [0, 1)
// with u = p +/- L t / (1 - t).

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "bayesop/errors.hpp"

namespace bayesop::quad {

enum class TailTransform { None, RationalMap };

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  TailTransform tail_transform = TailTransform::RationalMap;
  double tail_scale = 1.0;  // L in the rational map
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
};

namespace detail {

// QUADPACK qk21 abscissae and weights.
inline constexpr double xgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr double wgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double wg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b, value, error;
  int kind;  // 0 finite, 1 right tail [p, inf), 2 left tail (-inf, p]
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class G>
Panel gk21(const G& g, double a, double b, int kind) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = g(center);
  double resk = fc * wgk[10];
  double resg = 0.0;
  double resabs = std::abs(resk);
  double fv1[10], fv2[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = half * xgk[j];
    fv1[j] = g(center - dx);
    fv2[j] = g(center + dx);
    const double sum = fv1[j] + fv2[j];
    resk += wgk[j] * sum;
    resabs += wgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) resg += wg[j / 2] * sum;
  }
  const double mean = 0.5 * resk;
  double resasc = wgk[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j)
    resasc += wgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
  const double ah = std::abs(half);
  resk *= half;
  resabs *= ah;
  resasc *= ah;
  double err = std::abs(resk - resg * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  return {a, b, resk, err, kind};
}

}  // namespace detail

/// Integrates f over [lo, hi] (either end may be infinite), splitting first at
/// the given breakpoints. Throws ConvergenceError when the subdivision budget
/// runs out before the tolerance is met.
template <class F>
Result integrate(const F& f, double lo, double hi, const std::vector<double>& breakpoints,
                 const Options& opt = {}) {
  if (!(opt.abs_tol > 0.0) || !(opt.rel_tol > 0.0))
    fail(ErrorKind::Validation, "quadrature tolerances must be > 0");
  if (!(lo < hi)) fail(ErrorKind::Validation, "quadrature requires lo < hi");
  if ((std::isinf(lo) || std::isinf(hi)) && opt.tail_transform == TailTransform::None)
    fail(ErrorKind::Validation, "infinite domain requires a tail transform");

  std::vector<double> pts{lo};
  for (double p : breakpoints)
    if (std::isfinite(p) && p > lo && p < hi) pts.push_back(p);
  std::sort(pts.begin() + 1, pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (std::isinf(lo) && std::isinf(hi) && pts.size() == 1) pts.push_back(0.0);
  pts.push_back(hi);

  const double L = opt.tail_scale;
  const double left_anchor = pts[1];
  const double right_anchor = pts[pts.size() - 2];
  auto eval = [&](int kind, double t) {
    if (kind == 0) return f(t);
    const double s = 1.0 - t;
    const double u = L * t / s;
    const double v = kind == 1 ? f(right_anchor + u) : f(left_anchor - u);
    return v == 0.0 ? 0.0 : v * L / (s * s);
  };

  std::priority_queue<detail::Panel> heap;
  double total = 0.0, err = 0.0;
  auto push = [&](int kind, double a, double b) {
    const detail::Panel p = detail::gk21([&](double t) { return eval(kind, t); }, a, b, kind);
    total += p.value;
    err += p.error;
    heap.push(p);
  };
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    if (std::isinf(pts[i])) push(2, 0.0, 1.0);
    else if (std::isinf(pts[i + 1])) push(1, 0.0, 1.0);
    else push(0, pts[i], pts[i + 1]);
  }

  int subdivisions = 0;
  // Panels too narrow to split further leave the heap but keep contributing.
  double frozen_value = 0.0, frozen_err = 0.0;
  auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (err > tolerance() && !heap.empty()) {
    if (subdivisions >= opt.max_subdivisions)
      throw ConvergenceError("quadrature: subdivision budget exhausted (error " +
                                 std::to_string(err) + ")",
                             err);
    const detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      frozen_value += worst.value;
      frozen_err += worst.error;
      continue;
    }
    total -= worst.value;
    err -= worst.error;
    push(worst.kind, worst.a, mid);
    push(worst.kind, mid, worst.b);
    ++subdivisions;
    if (subdivisions % 64 == 0) {
      // re-sum so running add/subtract drift cannot stall the loop
      total = frozen_value;
      err = frozen_err;
      for (auto copy = heap; !copy.empty(); copy.pop()) {
        total += copy.top().value;
        err += copy.top().error;
      }
    }
  }
  if (err > tolerance())
    throw ConvergenceError("quadrature: roundoff prevents reaching tolerance", err);
  return {total, err, subdivisions};
}

}  // namespace bayesop::quad
