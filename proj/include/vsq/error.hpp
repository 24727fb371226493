#pragma once

#include <stdexcept>
#include <string>

namespace vsq {

/// A physical or numerical parameter violates its precondition (u0 <= 0, bad grid, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Arguments are individually valid but incompatible (grid mismatch, wrong slot domain).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NaN/Inf or runaway growth detected while stepping.
class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(const std::string& what, int step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

/// The requested measurement has no meaning (zero output energy, every slot masked).
class UndefinedMeasurement : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vsq
