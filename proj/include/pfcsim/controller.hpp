#pragma once

#include <optional>

#include "pfcsim/estimator.hpp"

namespace pfc {

enum class ControlMode {
  baseline,       // known parameters, measured current, no estimator
  adaptive,       // certainty-equivalent: estimates drive the controller
  observer_only,  // known-parameter controller, estimator runs open loop
};

const char* to_string(ControlMode mode) noexcept;

struct ControllerGains {
  double a = 2000.0;
  double b = 2.0e6;
  double c = 8000.0;
  std::optional<double> d;  // adaptive filter gain; defaults to c / E_nominal
  double ell = 1.0;          // current-loop gain, ohm
  double V_d = 200.0;        // V
  double v_min = 1.0;        // singularity guard on the 1/v in the control law
  int denominator_exponent = 2;  // s^2 + omega^exponent; 1 reproduces the printed typo

  double adaptive_gain(double E_nominal) const { return d.value_or(c / E_nominal); }

  /// Throws std::invalid_argument on non-positive gains or V_d <= E.
  void validate(double E) const;
};

struct ControllerState {
  double u = 0.0;
  Vec2 x = Vec2::Zero();
  bool saturated = false;
};

struct ErrorEnvelope {
  double q_hat = 0.0;
  double phi_hat = 0.0;
};

struct DesiredCurrent {
  double i_d = 0.0;
  double di_d_dt = 0.0;
};

struct FilterOutput {
  Vec2 x_dot = Vec2::Zero();
  double w = 0.0;
};

struct ScaledError {
  double e_hat = 0.0;
  ErrorEnvelope env;
};

/// Effective duty rate after the saturation rule. When hold is set the
/// resonant filter state must not be advanced either.
struct SaturationDecision {
  double u_dot = 0.0;
  bool hold = false;
};

DesiredCurrent desired_current(double t, double I0, double omega);

double tracking_error(double v_i, double i, double i_d, double di_d_dt, double u, double v,
                      double ell, double L);

/// State realization of gain (s^2 + a s + b) / (s^2 + omega^n):
///   x1' = x2,  x2' = -omega^n x1 + e_in,
///   w   = gain ((b - omega^n) x1 + a x2 + e_in).
FilterOutput resonant_filter_step(const Vec2& x, double e_in, double a, double b, double gain,
                                  double omega, int denominator_exponent = 2);

/// u' = (-u^2 i / C + w) / v. Throws NumericalAbort(singularity) for v <= v_min.
double u_derivative(double u, double v, double i, double w, double C, double v_min = 1.0);

ErrorEnvelope error_envelope(double E_hat, double G_hat, const ControllerGains& gains, double L,
                             double omega);

/// Estimate of E e(t) built from (E_hat, G_hat, i_hat); never divides by E_hat.
ScaledError scaled_error_estimate(double t, double E_hat, double G_hat, double i_hat, double u,
                                  double v, const ControllerGains& gains, double L,
                                  double omega);

double adaptive_u_derivative(double u, double v, double i_hat, double w_hat, double C,
                             double v_min = 1.0);

/// Zero the rate while u sits on a bound and the rate pushes outward.
SaturationDecision saturate_rate(double u, double u_dot);

double clamp_duty(double u);

}  // namespace pfc
