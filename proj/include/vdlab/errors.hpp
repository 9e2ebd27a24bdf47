#pragma once

#include <stdexcept>
#include <string>

namespace vdlab {

// Precondition on combinatorial or algebraic inputs violated.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Division or logarithm hit a value below the singularity tolerance.
class SingularPointError : public std::runtime_error {
 public:
  SingularPointError(const std::string& what, std::string subexpression)
      : std::runtime_error(what), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

// A quadrature or winding computation did not reach its tolerance.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

// A zero lies on (or numerically at) the integration circle.
class BoundaryZeroError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The curve left the affine chart at an evaluation point.
class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Degenerate configuration: curve inside the divisor, ineffective field,
// autoparallel curve, stationary point, degenerate probe.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vdlab
