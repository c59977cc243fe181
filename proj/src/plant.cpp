#include "pfcsim/plant.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pfc {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string("plant parameter ") + name +
                                " must be positive and finite");
  }
}

}  // namespace

void PlantParams::validate() const {
  require_positive(L, "L");
  require_positive(C, "C");
  require_positive(G, "G");
  require_positive(E, "E");
  require_positive(omega, "omega");
  if (!(R_s >= 0.0) || !std::isfinite(R_s)) {
    throw std::invalid_argument("plant parameter R_s must be non-negative and finite");
  }
}

double source_voltage(double t, double E, double omega) { return E * std::sin(omega * t); }

PlantDerivative plant_derivative(const PlantState& state, double u, double t,
                                 const PlantParams& p) {
  const double v_i = source_voltage(t, p.E, p.omega);
  return {(-u * state.v + v_i - p.R_s * state.i) / p.L, (u * state.i - p.G * state.v) / p.C};
}

PlantDerivative switched_derivative(const PlantState& state, int delta, double t,
                                    const PlantParams& p) {
  if (delta < -1 || delta > 1) {
    throw std::invalid_argument("switch value must be -1, 0 or +1, got " +
                                std::to_string(delta));
  }
  return plant_derivative(state, static_cast<double>(delta), t, p);
}

int pwm_sample(double u, double carrier_phase) {
  return 0.5 * (u + 1.0) >= carrier_phase ? 1 : -1;
}

double stored_energy(const PlantState& state, const PlantParams& p) {
  return 0.5 * p.L * state.i * state.i + 0.5 * p.C * state.v * state.v;
}

}  // namespace pfc
