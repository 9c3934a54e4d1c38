#pragma once

#include <stdexcept>
#include <string>

namespace superrad {

// Precondition violated by the caller: bad dimensions, invalid quantum
// numbers, non-Hermitian input where Hermitian is required, etc.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested object would exceed the configured dense-storage budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The step controller could not meet the requested tolerance.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time, double step, double error_estimate)
      : std::runtime_error(what + " (t=" + std::to_string(time) + ", h=" + std::to_string(step) +
                           ", err=" + std::to_string(error_estimate) + ")"),
        time_(time),
        step_(step),
        error_estimate_(error_estimate) {}

  double time() const noexcept { return time_; }
  double step() const noexcept { return step_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double time_;
  double step_;
  double error_estimate_;
};

}  // namespace superrad
