#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace pfc {

/// Malformed or out-of-range scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AbortKind {
  singularity,          // v at or below the controller's v_min threshold
  non_finite,           // NaN or Inf in the state or a derivative
  nonpositive_voltage,  // v <= 0, outside the model's operating region
};

const char* to_string(AbortKind kind) noexcept;

/// A simulation left the region where the model or control law is defined.
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(AbortKind kind, const std::string& message,
                 double time = std::numeric_limits<double>::quiet_NaN());

  AbortKind kind() const noexcept { return kind_; }
  double time() const noexcept { return time_; }

 private:
  AbortKind kind_;
  double time_;
};

}  // namespace pfc
