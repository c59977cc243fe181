#pragma once

#include <span>

#include <Eigen/Dense>

#include "pfcsim/plant.hpp"

namespace pfc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Tuning of the output-voltage-only estimator of (i, E, G).
///
/// J weights the per-parameter adaptation (E then G). The G direction sees a
/// regressor of order v/C, so its entry is several decades below the E entry.
/// D must be a multiple of the identity for the Lyapunov rate to be
/// sign-definite for every regressor; other SPD choices are accepted.
struct EstimatorGains {
  double k = 5e-3;
  Mat2 J = (Mat2() << 1.0, 0.0, 0.0, 5e-6).finished();
  Mat2 D = Mat2::Identity();

  /// Throws std::invalid_argument unless k > 0 and J, D are symmetric
  /// positive definite.
  void validate() const;
};

/// Filter states mu and the estimator state zeta = (zeta1, zeta2).
struct EstimatorState {
  Vec2 mu = Vec2::Zero();
  Vec3 zeta = Vec3::Zero();
};

/// Signals multiplying the unknowns in
///   di/dt = -u v / L + phi1' theta,   dv/dt = C1 iota + C2' theta.
struct Regressor {
  Vec2 phi1 = Vec2::Zero();
  Vec2 phi0 = Vec2::Zero();
  double C1 = 0.0;
  Vec2 C2 = Vec2::Zero();
};

struct Estimates {
  double i_hat = 0.0;
  Vec2 theta_hat = Vec2::Zero();  // (E_hat, G_hat)

  double E_hat() const { return theta_hat(0); }
  double G_hat() const { return theta_hat(1); }
};

/// Ground-truth error bookkeeping (simulation only).
struct ErrorDiagnostics {
  Vec3 eta_bar = Vec3::Zero();
  double V = 0.0;
  double V_dot = 0.0;
};

struct PEConfig {
  double T0 = 1.0 / 60.0;  // window length, s
  double stride = 1e-5;    // sample spacing, s

  void validate() const;
  /// Number of sample intervals covering T0.
  std::size_t intervals() const;
};

struct PEResult {
  Mat2 gram = Mat2::Zero();
  double min_eigenvalue = 0.0;

  bool persistently_exciting() const { return min_eigenvalue > 0.0; }
};

Regressor build_regressor(double v, double u, const Vec2& mu, double t, const PlantParams& p);

/// Shaping map beta = k blockdiag(1, J D) * integral_0^v C(y, u, mu) dy.
Vec3 beta(double v, double u, const Vec2& mu, const EstimatorGains& g, const PlantParams& p);

/// d(beta)/dv = k (C1, J D C2).
Vec3 beta_gradient_v(const Regressor& r, const EstimatorGains& g);

/// Explicit time partial of beta through u(t) and mu(t).
Vec3 beta_partial_t(double v, double u, double u_dot, const Vec2& mu, const Vec2& mu_dot,
                    const EstimatorGains& g, const PlantParams& p);

/// mu' = -k (I + D) C2 C1 + phi1.
Vec2 mu_derivative(const Vec2& mu, double v, double u, double t, const EstimatorGains& g,
                   const PlantParams& p);

/// zeta' chosen so the error eta - zeta - beta obeys eta_bar' = M(t) eta_bar.
Vec3 zeta_derivative(const Vec3& zeta, double v, double u, double u_dot, const Vec2& mu,
                     const Vec2& mu_dot, double t, const EstimatorGains& g,
                     const PlantParams& p);

Estimates estimates(const Vec3& zeta, double v, double u, const Vec2& mu,
                    const EstimatorGains& g, const PlantParams& p);

/// M(t) of the error dynamics eta_bar' = M eta_bar.
Mat3 error_matrix(const Regressor& r, const EstimatorGains& g);

/// 1/2 eta_bar' blockdiag(1, J^-1) eta_bar. Throws std::invalid_argument if
/// J is not SPD.
double lyapunov_value(const Vec3& eta_bar, const Mat2& J);

/// -k (C1^2 eta1^2 + eta2' sym(D C2 C2') eta2).
double lyapunov_rate(const Vec3& eta_bar, const Regressor& r, const EstimatorGains& g);

/// Trapezoidal Gram integral of C2 C2' over the first T0 of uniformly spaced
/// samples, plus its smallest eigenvalue. Throws std::invalid_argument when
/// the samples cover less than T0.
PEResult pe_gram(std::span<const Vec2> c2_samples, const PEConfig& cfg);

/// eta = col(i - mu' theta, theta).
Vec3 true_eta(double i, const Vec2& mu, const Vec2& theta);

ErrorDiagnostics error_diagnostics(double i, const Vec2& theta, const EstimatorState& s,
                                   double v, double u, double t, const EstimatorGains& g,
                                   const PlantParams& p);

}  // namespace pfc
