#pragma once

#include <stdexcept>
#include <string>

namespace bayesop {

enum class ErrorKind {
  Validation,         // malformed parameters or inputs
  Domain,             // argument outside a function's domain (non-finite, etc.)
  Pole,               // argument sits on a singularity
  NonDifferentiable,  // derivative requested at a kink
  Dispatch,           // operation called with the wrong family pair
  Unsupported,        // no formula or route exists for this combination
  Convergence,        // iterative/adaptive routine exhausted its budget
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Pole: return "pole";
    case ErrorKind::NonDifferentiable: return "non-differentiable";
    case ErrorKind::Dispatch: return "dispatch";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Convergence: return "convergence";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by adaptive routines that ran out of budget; carries the error
/// estimate that was reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved_error)
      : Error(ErrorKind::Convergence, what), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace bayesop
