#pragma once

#include <stdexcept>
#include <string>

namespace sns {

/// Invalid parameters or configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A field acquired non-finite coefficients while being advanced in time.
class BlowUpError : public std::runtime_error {
 public:
  explicit BlowUpError(double time)
      : std::runtime_error("non-finite vorticity at t = " + std::to_string(time)),
        time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace sns
