#pragma once

#include <numbers>

namespace pfc {

/// Averaged single-phase full-bridge boost rectifier.
///
///   L di/dt = -u v + E sin(omega t) - R_s i
///   C dv/dt =  u i - G v
///
/// R_s is a source-side disturbance only; the estimator never sees it.
struct PlantParams {
  double L = 1e-3;                          // H
  double C = 2e-3;                          // F
  double G = 0.02;                          // S
  double E = 155.563;                       // V, 110 V rms
  double omega = 2.0 * std::numbers::pi * 60.0;  // rad/s
  double R_s = 0.0;                         // ohm

  /// Throws std::invalid_argument when a field is outside its physical range.
  void validate() const;

  double period() const { return 2.0 * std::numbers::pi / omega; }
};

struct PlantState {
  double i = 0.0;  // A
  double v = 0.0;  // V
};

struct PlantDerivative {
  double di_dt = 0.0;
  double dv_dt = 0.0;
};

double source_voltage(double t, double E, double omega);

/// Right-hand side of the averaged model for a duty value u in [-1, 1].
PlantDerivative plant_derivative(const PlantState& state, double u, double t,
                                 const PlantParams& p);

/// Exact switched model: delta = delta1 - delta2 in {-1, 0, +1}.
/// Throws std::invalid_argument for any other value.
PlantDerivative switched_derivative(const PlantState& state, int delta, double t,
                                    const PlantParams& p);

/// Bipolar PWM comparator: +1 while (u+1)/2 >= carrier_phase, else -1.
int pwm_sample(double u, double carrier_phase);

/// Stored energy 1/2 L i^2 + 1/2 C v^2.
double stored_energy(const PlantState& state, const PlantParams& p);

}  // namespace pfc
