#include "pfcsim/steady_state.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pfc {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

void require_phase(double delta_rho) {
  if (!(std::abs(delta_rho) < kHalfPi)) {
    throw std::invalid_argument("phase difference must lie in (-pi/2, pi/2)");
  }
}

}  // namespace

void OperatingPoint::validate() const {
  require_phase(delta_rho);
  if (!(I_s >= 0.0) || !std::isfinite(I_s)) {
    throw std::invalid_argument("current amplitude must be non-negative and finite");
  }
}

double steady_current_amplitude(double delta_rho, double G, double V_d, double E) {
  require_phase(delta_rho);
  if (!(G > 0.0 && V_d > 0.0 && E > 0.0)) {
    throw std::invalid_argument("G, V_d and E must be positive");
  }
  return 2.0 * G * V_d * V_d / (E * std::cos(delta_rho));
}

double min_current_amplitude(double G, double V_d, double E) {
  return steady_current_amplitude(0.0, G, V_d, E);
}

double dc_output_voltage(double delta_rho, double I_s, double E, double G) {
  require_phase(delta_rho);
  if (!(G > 0.0)) throw std::invalid_argument("G must be positive");
  const double radicand = E * I_s * std::cos(delta_rho) / (2.0 * G);
  if (!(radicand > 0.0)) {
    throw std::invalid_argument("no positive DC level for this operating point");
  }
  return std::sqrt(radicand);
}

HarmonicCoefficients harmonic_coefficients(const OperatingPoint& op, double E, double L,
                                           double omega) {
  op.validate();
  const double lwi = L * omega * op.I_s;
  const double dr = op.delta_rho;
  return {0.5 * op.I_s * (E * std::cos(dr) - lwi * std::sin(2.0 * dr)),
          0.5 * op.I_s * (E * std::sin(dr) + lwi * std::cos(2.0 * dr))};
}

RippleTerm ripple_amplitude_phase(const OperatingPoint& op, double E, double L, double omega,
                                  double G, double C) {
  const auto [d1, d2] = harmonic_coefficients(op, E, L, omega);
  const double cw = C * omega;
  RippleTerm r;
  r.A = std::sqrt((d1 * d1 + d2 * d2) / (G * G + cw * cw));
  // v^2 ripple solves (C/2) y' + G y = -d1 cos(2wt) - d2 sin(2wt); the phase
  // below makes A sin(2wt + eps) equal that particular solution.
  const double num = -(G * d1 - cw * d2);
  const double den = -(G * d2 + cw * d1);
  if (num == 0.0 && den == 0.0) {
    r.phase_degenerate = true;
  } else {
    r.eps = std::atan2(num, den);
  }
  return r;
}

double steady_v_squared(double t, const OperatingPoint& op, const PlantParams& p) {
  const RippleTerm r = ripple_amplitude_phase(op, p.E, p.L, p.omega, p.G, p.C);
  const double dc = p.E * op.I_s * std::cos(op.delta_rho) / (2.0 * p.G);
  return dc + r.A * std::sin(2.0 * p.omega * t + r.eps);
}

ControlEnvelope control_voltage_envelope(const OperatingPoint& op, double E, double L,
                                         double omega) {
  op.validate();
  const double lwi = L * omega * op.I_s;
  const double s = std::sin(op.delta_rho);
  const double c = std::cos(op.delta_rho);
  // B cos(delta) = E - Lw I_s sin(dr), B sin(delta) = -Lw I_s cos(dr).
  const double in_phase = E - lwi * s;
  const double quadrature = -lwi * c;
  return {std::sqrt(E * E + lwi * lwi - 2.0 * E * lwi * s), std::atan2(quadrature, in_phase)};
}

double steady_current(double t, const OperatingPoint& op, double omega) {
  return op.I_s * std::sin(omega * t - op.delta_rho);
}

double steady_control_product(double t, const OperatingPoint& op, double E, double L,
                              double omega) {
  return E * std::sin(omega * t) - L * omega * op.I_s * std::cos(omega * t - op.delta_rho);
}

SteadyStateSummary summarize(const OperatingPoint& op, const PlantParams& p, double V_d) {
  op.validate();
  SteadyStateSummary s;
  s.V_s = op.I_s > 0.0 ? dc_output_voltage(op.delta_rho, op.I_s, p.E, p.G) : 0.0;
  s.I_0 = min_current_amplitude(p.G, V_d, p.E);
  const auto [d1, d2] = harmonic_coefficients(op, p.E, p.L, p.omega);
  s.d1 = d1;
  s.d2 = d2;
  const RippleTerm r = ripple_amplitude_phase(op, p.E, p.L, p.omega, p.G, p.C);
  s.A = r.A;
  s.eps = r.eps;
  s.eps_degenerate = r.phase_degenerate;
  const ControlEnvelope env = control_voltage_envelope(op, p.E, p.L, p.omega);
  s.B = env.B;
  s.delta = env.delta;
  return s;
}

}  // namespace pfc
