#pragma once

#include <stdexcept>
#include <string>

namespace mvs {

/// Invalid configuration: bad grid sizes, out-of-domain poles, mismatched inputs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation at a point where the requested quantity is undefined
/// (Green's function pole, sharp coefficient on the interface).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A quantity could not be measured on the given data (no crossing, too few points, ...).
class MeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver stopped without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_residual, long iterations)
      : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  long iterations_;
};

}  // namespace mvs
