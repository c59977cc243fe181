#include "pfcsim/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pfcsim/errors.hpp"

namespace pfc {

const char* to_string(ControlMode mode) noexcept {
  switch (mode) {
    case ControlMode::baseline:
      return "baseline";
    case ControlMode::adaptive:
      return "adaptive";
    case ControlMode::observer_only:
      return "observer-only";
  }
  return "unknown";
}

void ControllerGains::validate(double E) const {
  auto positive = [](double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument(std::string("controller gain ") + name + " must be positive");
    }
  };
  positive(a, "a");
  positive(b, "b");
  positive(c, "c");
  if (d) positive(*d, "d");
  positive(ell, "ell");
  positive(V_d, "V_d");
  if (!(v_min >= 0.0)) throw std::invalid_argument("controller v_min must be non-negative");
  if (!(V_d > E)) throw std::invalid_argument("desired output V_d must exceed the source amplitude E");
  if (denominator_exponent != 1 && denominator_exponent != 2) {
    throw std::invalid_argument("filter denominator exponent must be 1 or 2");
  }
}

DesiredCurrent desired_current(double t, double I0, double omega) {
  return {I0 * std::sin(omega * t), I0 * omega * std::cos(omega * t)};
}

double tracking_error(double v_i, double i, double i_d, double di_d_dt, double u, double v,
                      double ell, double L) {
  return v_i - L * di_d_dt - ell * (i_d - i) - u * v;
}

FilterOutput resonant_filter_step(const Vec2& x, double e_in, double a, double b, double gain,
                                  double omega, int denominator_exponent) {
  const double pole = denominator_exponent == 1 ? omega : omega * omega;
  FilterOutput out;
  out.x_dot << x(1), -pole * x(0) + e_in;
  out.w = gain * ((b - pole) * x(0) + a * x(1) + e_in);
  return out;
}

double u_derivative(double u, double v, double i, double w, double C, double v_min) {
  if (!(v > v_min)) {
    throw NumericalAbort(AbortKind::singularity,
                         "output voltage " + std::to_string(v) + " V at or below v_min " +
                             std::to_string(v_min) + " V; control law divides by v");
  }
  return (-u * u * i / C + w) / v;
}

ErrorEnvelope error_envelope(double E_hat, double G_hat, const ControllerGains& gains, double L,
                             double omega) {
  const double vd2 = gains.V_d * gains.V_d;
  const double in_phase = E_hat * E_hat - 2.0 * gains.ell * G_hat * vd2;
  const double quadrature = -2.0 * G_hat * vd2 * L * omega;
  ErrorEnvelope env;
  env.q_hat = std::hypot(in_phase, quadrature);
  env.phi_hat = (in_phase == 0.0 && quadrature == 0.0) ? 0.0 : std::atan2(in_phase, quadrature);
  return env;
}

ScaledError scaled_error_estimate(double t, double E_hat, double G_hat, double i_hat, double u,
                                  double v, const ControllerGains& gains, double L,
                                  double omega) {
  ScaledError s;
  s.env = error_envelope(E_hat, G_hat, gains, L, omega);
  s.e_hat = s.env.q_hat * std::cos(omega * t - s.env.phi_hat) - E_hat * (u * v - gains.ell * i_hat);
  return s;
}

double adaptive_u_derivative(double u, double v, double i_hat, double w_hat, double C,
                             double v_min) {
  return u_derivative(u, v, i_hat, w_hat, C, v_min);
}

SaturationDecision saturate_rate(double u, double u_dot) {
  if ((u >= 1.0 && u_dot > 0.0) || (u <= -1.0 && u_dot < 0.0)) return {0.0, true};
  return {u_dot, false};
}

double clamp_duty(double u) { return std::clamp(u, -1.0, 1.0); }

}  // namespace pfc
