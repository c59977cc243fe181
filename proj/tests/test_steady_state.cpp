#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pfcsim/steady_state.hpp"
#include "support.hpp"

using namespace pfc;
using std::numbers::pi;

namespace {

// v^2 written out as DC plus cos and sin second harmonics, derived directly
// from C v v' + G v^2 = p(t) with p(t) the instantaneous input power.
double expanded_v2(double t, double dr, double Is, const PlantParams& p) {
  const double lw = p.L * p.omega;
  const double d1 = 0.5 * Is * (p.E * std::cos(dr) - lw * Is * std::sin(2 * dr));
  const double d2 = 0.5 * Is * (p.E * std::sin(dr) + lw * Is * std::cos(2 * dr));
  const double cw = p.C * p.omega, den = p.G * p.G + cw * cw;
  return p.E * Is / (2 * p.G) * std::cos(dr) - (p.G * d1 - cw * d2) / den * std::cos(2 * p.omega * t) -
         (p.G * d2 + cw * d1) / den * std::sin(2 * p.omega * t);
}

// Fourier solution of the power balance, solved independently: with
// p(t) = P0 + Pc cos 2wt + Ps sin 2wt, x = v^2 obeys (C/2) x' + G x = p.
double power_balance_v2(double t, double dr, double Is, const PlantParams& p) {
  const double lw = p.L * p.omega;
  // E sin(wt) Is sin(wt - dr) - L Is^2 w sin(wt - dr) cos(wt - dr)
  const double P0 = 0.5 * p.E * Is * std::cos(dr);
  const double Pc = -0.5 * p.E * Is * std::cos(dr) + 0.5 * lw * Is * Is * std::sin(2 * dr);
  const double Ps = -0.5 * p.E * Is * std::sin(dr) - 0.5 * lw * Is * Is * std::cos(2 * dr);
  // x = X0 + Xc cos + Xs sin:  G Xc + C w Xs = Pc,  G Xs - C w Xc = Ps
  const double cw = p.C * p.omega, den = p.G * p.G + cw * cw;
  const double Xc = (p.G * Pc - cw * Ps) / den;
  const double Xs = (p.G * Ps + cw * Pc) / den;
  return P0 / p.G + Xc * std::cos(2 * p.omega * t) + Xs * std::sin(2 * p.omega * t);
}

PlantParams random_plant(testing::Gen& gen) {
  PlantParams p;
  p.L = gen.log_uniform(1e-4, 1e-2);
  p.C = gen.log_uniform(1e-4, 1e-2);
  p.G = gen.log_uniform(1e-3, 1e-1);
  p.E = gen.uniform(50, 400);
  p.omega = 2 * pi * gen.uniform(45, 65);
  return p;
}

}  // namespace

TEST_SUITE("steady_state") {

TEST_CASE("current amplitudes") {
  const double E = 155.563;
  CHECK(steady_current_amplitude(0.0, 0.02, 200.0, E) == doctest::Approx(10.285).epsilon(1e-4));
  CHECK(steady_current_amplitude(pi / 3, 0.02, 200.0, E) == doctest::Approx(20.570).epsilon(1e-4));
  CHECK(steady_current_amplitude(0.0, 0.02, 200.0, E) == min_current_amplitude(0.02, 200.0, E));
  CHECK(min_current_amplitude(0.5, 1.0, 2.0) == doctest::Approx(0.5));
  CHECK(min_current_amplitude(0.02, 400.0, E) ==
        doctest::Approx(4.0 * min_current_amplitude(0.02, 200.0, E)));
  CHECK_THROWS_AS(steady_current_amplitude(pi / 2, 0.02, 200.0, E), std::invalid_argument);
  CHECK_THROWS_AS(steady_current_amplitude(-2.0, 0.02, 200.0, E), std::invalid_argument);
}

TEST_CASE("dc output voltage") {
  const double E = 155.563;
  CHECK(dc_output_voltage(0.0, min_current_amplitude(0.02, 200.0, E), E, 0.02) ==
        doctest::Approx(200.0).epsilon(1e-14));
  CHECK(dc_output_voltage(0.0, 0.5, 2.0, 0.5) == doctest::Approx(1.0));
  CHECK(dc_output_voltage(pi / 2 - 1e-9, 10.0, E, 0.02) < 1e-2);
  CHECK_THROWS_AS(dc_output_voltage(0.0, 0.0, E, 0.02), std::invalid_argument);
}

TEST_CASE("harmonic coefficients") {
  const double lw = 0.377;
  auto [d1, d2] = harmonic_coefficients({0.0, 10.0}, 155.563, lw / 377.0, 377.0);
  CHECK(d1 == doctest::Approx(777.815).epsilon(1e-6));
  CHECK(d2 == doctest::Approx(18.85).epsilon(1e-6));

  auto zero = harmonic_coefficients({0.3, 0.0}, 155.563, 1e-3, 377.0);
  CHECK(zero.d1 == 0.0);
  CHECK(zero.d2 == 0.0);

  auto q = harmonic_coefficients({pi / 4, 2.0}, 1.0, 1.0, 1.0);
  CHECK(q.d1 == doctest::Approx(1.0 / std::sqrt(2.0) - 2.0).epsilon(1e-14));
  CHECK(q.d2 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("ripple amplitude and phase") {
  // L w = 0.377 and C w = 0.754 at w = 377.
  const RippleTerm r = ripple_amplitude_phase({0.0, 10.0}, 155.563, 0.377 / 377.0, 377.0, 0.02,
                                              0.754 / 377.0);
  CHECK(r.A == doctest::Approx(1031.5).epsilon(1e-4));
  CHECK_FALSE(r.phase_degenerate);

  const RippleTerm none = ripple_amplitude_phase({0.0, 0.0}, 155.563, 1e-3, 377.0, 0.02, 2e-3);
  CHECK(none.A == 0.0);
  CHECK(none.eps == 0.0);
  CHECK(none.phase_degenerate);
}

TEST_CASE("ripple homogeneity in the current scale") {
  // (d1, d2) are not linear in I_s, so scale E and L*I_s together instead:
  // I_s -> s I_s with E -> s E keeps the ratio and scales (d1, d2) by s^2.
  testing::Gen gen(21);
  for (int n = 0; n < 100; ++n) {
    const PlantParams p = random_plant(gen);
    const OperatingPoint op{gen.uniform(-1.4, 1.4), gen.uniform(0.5, 20)};
    const double s = gen.uniform(0.2, 5.0);
    const RippleTerm a = ripple_amplitude_phase(op, p.E, p.L, p.omega, p.G, p.C);
    const RippleTerm b = ripple_amplitude_phase({op.delta_rho, s * op.I_s}, s * p.E, p.L, p.omega,
                                                p.G, p.C);
    CHECK(testing::rel_err(b.A, s * s * a.A) < 1e-12);
    CHECK(std::abs(std::remainder(b.eps - a.eps, 2 * pi)) < 1e-12);
  }
}

TEST_CASE("compact v^2 agrees with the expanded and power-balance forms") {
  testing::Gen gen(22);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const PlantParams p = random_plant(gen);
    const OperatingPoint op{gen.uniform(-1.5, 1.5), gen.uniform(0.1, 40.0)};
    for (int k = 0; k < 100; ++k) {
      const double t = gen.uniform(0.0, 2.0 * p.period());
      const double compact = steady_v_squared(t, op, p);
      const double a = expanded_v2(t, op.delta_rho, op.I_s, p);
      const double b = power_balance_v2(t, op.delta_rho, op.I_s, p);
      worst = std::max({worst, std::abs(compact - a) / std::abs(a), std::abs(a - b) / std::abs(a)});
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("steady v^2 sampled properties") {
  PlantParams p;
  const OperatingPoint op{0.2, 12.0};
  const RippleTerm r = ripple_amplitude_phase(op, p.E, p.L, p.omega, p.G, p.C);
  const double dc = dc_output_voltage(op.delta_rho, op.I_s, p.E, p.G);
  const double t0 = (pi - r.eps) / (2 * p.omega);  // sin(2wt + eps) = 0
  CHECK(steady_v_squared(t0, op, p) == doctest::Approx(dc * dc).epsilon(1e-12));

  const int n = 4000;
  double mean = 0.0;
  for (int k = 0; k < n; ++k) mean += steady_v_squared((k + 0.5) * p.period() / n, op, p);
  CHECK(mean / n == doctest::Approx(dc * dc).epsilon(1e-12));
}

TEST_CASE("control envelope") {
  const ControlEnvelope idle = control_voltage_envelope({0.0, 0.0}, 155.563, 1e-3, 377.0);
  CHECK(idle.B == doctest::Approx(155.563));
  CHECK(idle.delta == 0.0);

  // Phase sign follows the current equation (see substitution test below).
  const ControlEnvelope a = control_voltage_envelope({0.0, 10.0}, 155.563, 1e-3, 377.0);
  CHECK(a.B == doctest::Approx(155.61).epsilon(1e-4));
  CHECK(a.delta == doctest::Approx(-0.02423).epsilon(1e-3));

  const ControlEnvelope b = control_voltage_envelope({0.0, 1.0}, 1.0, 1.0, 1.0);
  CHECK(b.B == doctest::Approx(std::sqrt(2.0)));
  CHECK(b.delta == doctest::Approx(-pi / 4));
}

TEST_CASE("envelope satisfies the current equation") {
  testing::Gen gen(23);
  for (int n = 0; n < 200; ++n) {
    const PlantParams p = random_plant(gen);
    const OperatingPoint op{gen.uniform(-1.5, 1.5), gen.uniform(0.1, 40.0)};
    const ControlEnvelope env = control_voltage_envelope(op, p.E, p.L, p.omega);
    CHECK(env.B > 0.0);
    CHECK(env.delta != 0.0);
    for (int k = 0; k < 20; ++k) {
      const double t = gen.uniform(0.0, p.period());
      // L di_s/dt = -u_s v_s + E sin(wt)
      const double di = op.I_s * p.omega * std::cos(p.omega * t - op.delta_rho);
      const double from_plant = p.E * std::sin(p.omega * t) - p.L * di;
      const double from_envelope = env.B * std::sin(p.omega * t + env.delta);
      CHECK(std::abs(from_plant - from_envelope) < 1e-9 * env.B);
      CHECK(std::abs(steady_control_product(t, op, p.E, p.L, p.omega) - from_plant) < 1e-9 * env.B);
    }
  }
}

TEST_CASE("round trip") {
  testing::Gen gen(24);
  for (int n = 0; n < 1000; ++n) {
    const double dr = gen.uniform(-pi / 2 + 1e-3, pi / 2 - 1e-3);
    const double G = gen.log_uniform(1e-3, 1e-1), E = gen.uniform(50, 400);
    const double V_d = E * gen.uniform(1.01, 3.0);
    const double Is = steady_current_amplitude(dr, G, V_d, E);
    CHECK(testing::rel_err(dc_output_voltage(dr, Is, E, G), V_d) < 1e-12);
  }
}

TEST_CASE("operating point validation and summary") {
  CHECK_THROWS_AS(OperatingPoint({pi / 2, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(OperatingPoint({0.0, -1.0}).validate(), std::invalid_argument);
  CHECK_NOTHROW(OperatingPoint({0.0, 0.0}).validate());

  PlantParams p;
  const double I0 = min_current_amplitude(p.G, 200.0, p.E);
  const SteadyStateSummary s = summarize({0.0, I0}, p, 200.0);
  CHECK(s.V_s == doctest::Approx(200.0));
  CHECK(s.I_0 == doctest::Approx(I0));
  CHECK(s.A > 0.0);
  CHECK(s.B > 0.0);
}

}  // TEST_SUITE
