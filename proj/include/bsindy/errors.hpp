#pragma once

#include <stdexcept>
#include <string>

namespace bsindy {

/// Invalid configuration, arguments or precondition violations.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure (divergence, factorization breakdown, undefined statistic).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the integrator when the state leaves the finite / bounded region.
class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, double last_valid_time)
      : NumericError(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bsindy
