#include "pfcsim/errors.hpp"

namespace pfc {

const char* to_string(AbortKind kind) noexcept {
  switch (kind) {
    case AbortKind::singularity:
      return "singularity";
    case AbortKind::non_finite:
      return "non-finite";
    case AbortKind::nonpositive_voltage:
      return "nonpositive-voltage";
  }
  return "unknown";
}

NumericalAbort::NumericalAbort(AbortKind kind, const std::string& message, double time)
    : std::runtime_error(message), kind_(kind), time_(time) {}

}  // namespace pfc
