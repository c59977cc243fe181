#pragma once

#include "pfcsim/plant.hpp"

namespace pfc {

/// Postulated steady input current i_s(t) = I_s sin(omega t - delta_rho).
struct OperatingPoint {
  double delta_rho = 0.0;  // rad, current lag behind the source
  double I_s = 0.0;        // A

  /// Requires |delta_rho| < pi/2 and I_s >= 0 (I_s = 0 is the degenerate
  /// no-load point, accepted so the harmonic terms can be evaluated there).
  void validate() const;
};

struct HarmonicCoefficients {
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Second-harmonic term A sin(2 omega t + eps) of v^2.
struct RippleTerm {
  double A = 0.0;
  double eps = 0.0;
  bool phase_degenerate = false;  // I_s = 0: eps reported as 0
};

/// u_s v_s = B sin(omega t + delta).
struct ControlEnvelope {
  double B = 0.0;
  double delta = 0.0;
};

struct SteadyStateSummary {
  double V_s = 0.0;
  double I_0 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double A = 0.0;
  double eps = 0.0;
  bool eps_degenerate = false;
  double B = 0.0;
  double delta = 0.0;
};

/// Current amplitude that puts the DC output at V_d for a given phase lag.
double steady_current_amplitude(double delta_rho, double G, double V_d, double E);

/// I_0: the in-phase (minimum) current amplitude for output V_d.
double min_current_amplitude(double G, double V_d, double E);

double dc_output_voltage(double delta_rho, double I_s, double E, double G);

HarmonicCoefficients harmonic_coefficients(const OperatingPoint& op, double E, double L,
                                           double omega);

RippleTerm ripple_amplitude_phase(const OperatingPoint& op, double E, double L, double omega,
                                  double G, double C);

/// Compact closed form DC + A sin(2 omega t + eps) of the steady v^2.
double steady_v_squared(double t, const OperatingPoint& op, const PlantParams& p);

ControlEnvelope control_voltage_envelope(const OperatingPoint& op, double E, double L,
                                         double omega);

double steady_current(double t, const OperatingPoint& op, double omega);

/// u_s v_s obtained by substituting i_s into the current equation:
/// E sin(omega t) - L omega I_s cos(omega t - delta_rho).
double steady_control_product(double t, const OperatingPoint& op, double E, double L,
                              double omega);

SteadyStateSummary summarize(const OperatingPoint& op, const PlantParams& p, double V_d);

}  // namespace pfc
