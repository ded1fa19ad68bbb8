#pragma once

#include <string>
#include <vector>

#include "bayesop/distributions.hpp"

namespace bayesop {

/// Prior x signal pairs. Names read prior first.
enum class Combo {
  GaussianGaussian,
  GaussianLaplace,
  GaussianCauchy,
  LaplaceGaussian,
  LaplaceLaplace,
  LaplaceCauchy,
  CauchyGaussian,
  CauchyLaplace,
  CauchyCauchy,
  Mixture,
  Biased,
  Other,  // any pair involving a bounded uniform prior
};

enum class Method { ClosedForm, Quadrature };

inline const char* to_string(Combo c) {
  switch (c) {
    case Combo::GaussianGaussian: return "gaussian_gaussian";
    case Combo::GaussianLaplace: return "gaussian_laplace";
    case Combo::GaussianCauchy: return "gaussian_cauchy";
    case Combo::LaplaceGaussian: return "laplace_gaussian";
    case Combo::LaplaceLaplace: return "laplace_laplace";
    case Combo::LaplaceCauchy: return "laplace_cauchy";
    case Combo::CauchyGaussian: return "cauchy_gaussian";
    case Combo::CauchyLaplace: return "cauchy_laplace";
    case Combo::CauchyCauchy: return "cauchy_cauchy";
    case Combo::Mixture: return "mixture";
    case Combo::Biased: return "biased";
    case Combo::Other: return "other";
  }
  return "unknown";
}

inline const char* to_string(Method m) {
  return m == Method::ClosedForm ? "closed_form" : "quadrature";
}

inline Combo combo_of(Family prior, Family noise) {
  if (prior == Family::BoundedUniform || noise == Family::BoundedUniform) return Combo::Other;
  const int p = prior == Family::Gaussian ? 0 : prior == Family::Laplace ? 1 : 2;
  const int n = noise == Family::Gaussian ? 0 : noise == Family::Laplace ? 1 : 2;
  return static_cast<Combo>(3 * p + n);
}

inline Family prior_family(Combo c) {
  const int i = static_cast<int>(c);
  if (i >= 9) fail(ErrorKind::Dispatch, "combo has no single prior family");
  return static_cast<Family>(i / 3);
}

inline Family noise_family(Combo c) {
  const int i = static_cast<int>(c);
  if (i >= 9) fail(ErrorKind::Dispatch, "combo has no single noise family");
  return static_cast<Family>(i % 3);
}

struct PosteriorResult {
  double theta1 = 0.0;
  double shift = 0.0;  // theta1 - theta0
  Method method = Method::ClosedForm;
  Combo combo = Combo::Other;
  std::vector<std::string> warnings;
};

inline PosteriorResult make_result(double theta0, double theta1, Method method, Combo combo) {
  PosteriorResult r;
  r.theta1 = theta1;
  r.shift = theta1 - theta0;
  r.method = method;
  r.combo = combo;
  return r;
}

}  // namespace bayesop
