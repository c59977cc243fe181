#include "pfcsim/estimator.hpp"

#include <cmath>
#include <stdexcept>

namespace pfc {

namespace {

bool is_spd(const Mat2& m) {
  if (!m.allFinite() || std::abs(m(0, 1) - m(1, 0)) > 1e-12 * m.cwiseAbs().maxCoeff()) {
    return false;
  }
  Eigen::LLT<Mat2> llt(m);
  return llt.info() == Eigen::Success;
}

}  // namespace

void EstimatorGains::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("estimator gain k must be positive");
  if (!is_spd(J)) throw std::invalid_argument("estimator matrix J must be symmetric positive definite");
  if (!is_spd(D)) throw std::invalid_argument("estimator matrix D must be symmetric positive definite");
}

void PEConfig::validate() const {
  if (!(T0 > 0.0)) throw std::invalid_argument("PE window T0 must be positive");
  if (!(stride > 0.0)) throw std::invalid_argument("PE sampling stride must be positive");
}

std::size_t PEConfig::intervals() const {
  return static_cast<std::size_t>(std::max(1.0, std::round(T0 / stride)));
}

Regressor build_regressor(double v, double u, const Vec2& mu, double t, const PlantParams& p) {
  Regressor r;
  r.phi1 << std::sin(p.omega * t) / p.L, 0.0;
  r.phi0 << 0.0, -v / p.C;
  r.C1 = u / p.C;
  r.C2 = u * mu / p.C + r.phi0;
  return r;
}

Vec3 beta(double v, double u, const Vec2& mu, const EstimatorGains& g, const PlantParams& p) {
  const Vec2 inner = u * mu - Vec2(0.0, 0.5 * v);
  Vec3 b;
  b(0) = g.k * u * v / p.C;
  b.tail<2>() = g.k * g.J * g.D * inner * (v / p.C);
  return b;
}

Vec3 beta_gradient_v(const Regressor& r, const EstimatorGains& g) {
  Vec3 b;
  b(0) = g.k * r.C1;
  b.tail<2>() = g.k * g.J * g.D * r.C2;
  return b;
}

Vec3 beta_partial_t(double v, double u, double u_dot, const Vec2& mu, const Vec2& mu_dot,
                    const EstimatorGains& g, const PlantParams& p) {
  Vec3 b;
  b(0) = g.k * v * u_dot / p.C;
  b.tail<2>() = g.k * g.J * g.D * (u_dot * mu + u * mu_dot) * (v / p.C);
  return b;
}

Vec2 mu_derivative(const Vec2& mu, double v, double u, double t, const EstimatorGains& g,
                   const PlantParams& p) {
  const Regressor r = build_regressor(v, u, mu, t, p);
  return -g.k * (Mat2::Identity() + g.D) * r.C2 * r.C1 + r.phi1;
}

Vec3 zeta_derivative(const Vec3& zeta, double v, double u, double u_dot, const Vec2& mu,
                     const Vec2& mu_dot, double t, const EstimatorGains& g,
                     const PlantParams& p) {
  const Regressor r = build_regressor(v, u, mu, t, p);

  Mat3 A = Mat3::Zero();
  A.block<1, 2>(0, 1) = (r.phi1 - mu_dot).transpose();

  Vec3 c;
  c << r.C1, r.C2;
  const Mat3 system = A - beta_gradient_v(r, g) * c.transpose();

  Vec3 drive = Vec3::Zero();
  drive(0) = u * v / p.L;

  return system * (zeta + beta(v, u, mu, g, p)) - drive -
         beta_partial_t(v, u, u_dot, mu, mu_dot, g, p);
}

Estimates estimates(const Vec3& zeta, double v, double u, const Vec2& mu,
                    const EstimatorGains& g, const PlantParams& p) {
  const Vec3 eta_hat = zeta + beta(v, u, mu, g, p);
  Estimates e;
  e.theta_hat = eta_hat.tail<2>();
  e.i_hat = eta_hat(0) + mu.dot(e.theta_hat);
  return e;
}

Mat3 error_matrix(const Regressor& r, const EstimatorGains& g) {
  const Mat2 JD = g.J * g.D;
  Mat3 m;
  m(0, 0) = r.C1 * r.C1;
  m.block<1, 2>(0, 1) = -r.C1 * (r.C2.transpose() * g.D);
  m.block<2, 1>(1, 0) = JD * r.C2 * r.C1;
  m.block<2, 2>(1, 1) = JD * r.C2 * r.C2.transpose();
  return -g.k * m;
}

double lyapunov_value(const Vec3& eta_bar, const Mat2& J) {
  Eigen::LLT<Mat2> llt(J);
  if (llt.info() != Eigen::Success || std::abs(J(0, 1) - J(1, 0)) > 1e-12 * J.cwiseAbs().maxCoeff()) {
    throw std::invalid_argument("Lyapunov weight J must be symmetric positive definite");
  }
  const Vec2 tail = eta_bar.tail<2>();
  return 0.5 * (eta_bar(0) * eta_bar(0) + tail.dot(llt.solve(tail)));
}

double lyapunov_rate(const Vec3& eta_bar, const Regressor& r, const EstimatorGains& g) {
  const Vec2 tail = eta_bar.tail<2>();
  // eta2' sym(D C2 C2') eta2 = (eta2' D C2)(C2' eta2)
  const double cross = tail.dot(g.D * r.C2) * r.C2.dot(tail);
  return -g.k * (r.C1 * r.C1 * eta_bar(0) * eta_bar(0) + cross);
}

PEResult pe_gram(std::span<const Vec2> c2_samples, const PEConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.intervals();
  if (c2_samples.size() < n + 1) {
    throw std::invalid_argument("PE window shorter than T0");
  }
  PEResult res;
  for (std::size_t j = 0; j <= n; ++j) {
    const double w = (j == 0 || j == n) ? 0.5 : 1.0;
    res.gram.noalias() += w * c2_samples[j] * c2_samples[j].transpose();
  }
  res.gram *= cfg.stride;
  Eigen::SelfAdjointEigenSolver<Mat2> eig(res.gram, Eigen::EigenvaluesOnly);
  res.min_eigenvalue = eig.eigenvalues()(0);
  return res;
}

Vec3 true_eta(double i, const Vec2& mu, const Vec2& theta) {
  Vec3 eta;
  eta << i - mu.dot(theta), theta;
  return eta;
}

ErrorDiagnostics error_diagnostics(double i, const Vec2& theta, const EstimatorState& s,
                                   double v, double u, double t, const EstimatorGains& g,
                                   const PlantParams& p) {
  ErrorDiagnostics d;
  d.eta_bar = true_eta(i, s.mu, theta) - s.zeta - beta(v, u, s.mu, g, p);
  d.V = lyapunov_value(d.eta_bar, g.J);
  d.V_dot = lyapunov_rate(d.eta_bar, build_regressor(v, u, s.mu, t, p), g);
  return d;
}

}  // namespace pfc
