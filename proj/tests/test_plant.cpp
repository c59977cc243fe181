#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "pfcsim/integrator.hpp"
#include "pfcsim/plant.hpp"
#include "support.hpp"

using namespace pfc;
using std::numbers::pi;

namespace {

PlantParams bench(double E, double L, double C, double G, double R_s = 0.0) {
  PlantParams p;
  p.E = E;
  p.L = L;
  p.C = C;
  p.G = G;
  p.R_s = R_s;
  return p;
}

}  // namespace

TEST_SUITE("plant") {

TEST_CASE("source voltage") {
  CHECK(source_voltage(0.0, 100.0, 377.0) == 0.0);
  CHECK(source_voltage(pi / 2 / 377.0, 100.0, 377.0) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(source_voltage(pi / 6 / 377.0, 100.0, 377.0) == doctest::Approx(50.0).epsilon(1e-14));
}

TEST_CASE("averaged derivative examples") {
  PlantParams p = bench(100.0, 0.1, 0.01, 0.05);
  const double t_peak = pi / 2 / p.omega;

  const PlantDerivative idle = plant_derivative({0.0, 40.0}, 0.0, 0.0, p);
  CHECK(idle.di_dt == 0.0);
  CHECK(idle.dv_dt == doctest::Approx(-0.05 * 40.0 / 0.01));

  const PlantDerivative d = plant_derivative({2.0, 10.0}, 0.5, t_peak, p);
  CHECK(d.di_dt == doctest::Approx(950.0).epsilon(1e-12));
  CHECK(d.dv_dt == doctest::Approx(50.0).epsilon(1e-12));

  PlantParams r = bench(100.0, 1.0, 0.01, 0.05, 1.0);
  CHECK(plant_derivative({1.0, 10.0}, 0.0, 0.0, r).di_dt == doctest::Approx(-1.0));
}

TEST_CASE("switched derivative examples") {
  PlantParams p = bench(100.0, 0.1, 0.01, 0.05);
  const double t_peak = pi / 2 / p.omega;

  const PlantDerivative up = switched_derivative({2.0, 10.0}, 1, t_peak, p);
  CHECK(up.di_dt == doctest::Approx(900.0));
  CHECK(up.dv_dt == doctest::Approx(150.0));
  const PlantDerivative down = switched_derivative({2.0, 10.0}, -1, t_peak, p);
  CHECK(down.di_dt == doctest::Approx(1100.0));
  CHECK(down.dv_dt == doctest::Approx(-250.0));

  const PlantDerivative zero = switched_derivative({3.0, 7.0}, 0, 0.0, p);
  const PlantDerivative avg = plant_derivative({3.0, 7.0}, 0.0, 0.0, p);
  CHECK(zero.di_dt == avg.di_dt);
  CHECK(zero.dv_dt == avg.dv_dt);

  CHECK_THROWS_AS(switched_derivative({0.0, 1.0}, 2, 0.0, p), std::invalid_argument);
  CHECK_THROWS_AS(switched_derivative({0.0, 1.0}, -2, 0.0, p), std::invalid_argument);
}

TEST_CASE("pwm sampling") {
  for (double phase : {1e-3, 0.3, 0.999}) {
    CHECK(pwm_sample(1.0, phase) == 1);
    CHECK(pwm_sample(-1.0, phase) == -1);
  }
  // Uniform phase sweep averages to the duty value.
  for (double u : {0.0, 0.37, -0.61}) {
    const int n = 100000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += pwm_sample(u, (k + 0.5) / n);
    CHECK(sum / n == doctest::Approx(u).epsilon(1e-4));
  }
}

TEST_CASE("parameter validation") {
  PlantParams p;
  CHECK_NOTHROW(p.validate());
  p.L = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = PlantParams{};
  p.R_s = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("energy identity") {
  testing::Gen gen(11);
  for (int n = 0; n < 1000; ++n) {
    const PlantParams p = bench(gen.uniform(50, 400), gen.log_uniform(1e-4, 1e-1),
                                gen.log_uniform(1e-4, 1e-1), gen.log_uniform(1e-3, 1.0));
    const PlantState s{gen.uniform(-30, 30), gen.uniform(1, 500)};
    const double u = gen.uniform(-1, 1), t = gen.uniform(0, 1);
    const PlantDerivative d = plant_derivative(s, u, t, p);
    const double lhs = p.L * s.i * d.di_dt + p.C * s.v * d.dv_dt;
    const double rhs = source_voltage(t, p.E, p.omega) * s.i - p.G * s.v * s.v;
    const double scale = std::abs(u * s.v * s.i) + std::abs(source_voltage(t, p.E, p.omega) * s.i) +
                         p.G * s.v * s.v;
    CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
  }
}

TEST_CASE("current reversal symmetry without source") {
  // (i, u) -> (-i, -u) flips di/dt and leaves dv/dt alone when E sin(wt) = 0.
  testing::Gen gen(12);
  PlantParams p;
  p.R_s = 0.3;
  for (int n = 0; n < 200; ++n) {
    const PlantState s{gen.uniform(-20, 20), gen.uniform(1, 300)};
    const double u = gen.uniform(-1, 1);
    const PlantDerivative a = plant_derivative(s, u, 0.0, p);
    const PlantDerivative b = plant_derivative({-s.i, s.v}, -u, 0.0, p);
    CHECK(b.di_dt == -a.di_dt);
    CHECK(b.dv_dt == a.dv_dt);
  }
}

// Open-loop sinusoidal duty over one line cycle. Sampled at carrier
// boundaries, the switched trajectory approaches the averaged one at first
// order in the carrier period.
TEST_CASE("averaging consistency") {
  PlantParams p;
  const int per_carrier = 80;
  auto duty = [&](double t) { return 0.6 * std::sin(p.omega * t - 0.2); };
  using Vec = Eigen::Vector2d;

  auto worst_gap = [&](double fc, double& peak_i) {
    const double dt = 1.0 / fc / per_carrier;
    Vec avg(0.0, 180.0), sw = avg;
    double worst = 0.0;
    peak_i = 0.0;
    const int carriers = static_cast<int>(std::round(fc / 60.0));
    for (int c = 0; c < carriers; ++c) {
      for (int k = 0; k < per_carrier; ++k) {
        const double t = (c * per_carrier + k) * dt;
        const int delta = pwm_sample(duty(t + 0.5 * dt), (k + 0.5) / per_carrier);
        sw = rk4_step(
            [&](const Vec& x, double tau) {
              const PlantDerivative d = switched_derivative({x(0), x(1)}, delta, tau, p);
              return Vec(d.di_dt, d.dv_dt);
            },
            sw, t, dt);
        avg = rk4_step(
            [&](const Vec& x, double tau) {
              const PlantDerivative d = plant_derivative({x(0), x(1)}, duty(tau), tau, p);
              return Vec(d.di_dt, d.dv_dt);
            },
            avg, t, dt);
      }
      peak_i = std::max(peak_i, std::abs(avg(0)));
      worst = std::max(worst, (sw - avg).norm());
    }
    return worst;
  };

  double peak = 0.0;
  const double g12 = worst_gap(12000.0, peak);
  const double g24 = worst_gap(24000.0, peak);
  const double g48 = worst_gap(48000.0, peak);
  INFO("gaps " << g12 << " " << g24 << " " << g48);
  CHECK(g12 / g24 > 1.6);
  CHECK(g24 / g48 > 1.6);
  CHECK(g48 < 0.02 * peak);
}

TEST_CASE("stored energy") {
  PlantParams p;
  CHECK(stored_energy({2.0, 100.0}, p) == doctest::Approx(0.5 * 1e-3 * 4 + 0.5 * 2e-3 * 1e4));
}

}  // TEST_SUITE
