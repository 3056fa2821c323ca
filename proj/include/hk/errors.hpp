#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hk {

// Error taxonomy shared by all modules. The CLI maps categories to exit codes.
enum class ErrorKind {
  Contract,            // precondition violated by the caller
  Config,              // malformed experiment configuration
  StripViolation,      // complex argument outside the declared strip
  UnsupportedVariant,  // operation not available for this function variant
  Monotonicity,        // negative derivative where monotonicity is required
  Truncation,          // tail not decayed inside the working window
  Accuracy,            // quadrature or iteration did not reach tolerance
  FitQuality,          // model fit residual above threshold
  Divergence,          // exponential weight outside the moment-finite region
  RouteMismatch,       // operation not defined for this discretization route
  Periodization,       // function not compatible with a periodic grid
  DerivativeRequired,  // derivative needed but unavailable
  SignConstraint,      // c1*c2 <= 0 in the rank-one family
  NotApplicable,       // identity requires a positive finite-rank model
  ProbeSelection,      // probe points give a singular evaluation matrix
  Containment,         // range of inner function escapes outer domain
  SectionAbsent,       // report lacks the requested section
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Accuracy-type failures carry the estimate that was actually reached.
class AccuracyError : public Error {
 public:
  AccuracyError(ErrorKind kind, const std::string& what, double achieved)
      : Error(kind, what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::Contract, what);
}

}  // namespace hk
