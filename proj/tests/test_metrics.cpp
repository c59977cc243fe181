#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pfcsim/config.hpp"
#include "pfcsim/metrics.hpp"
#include "support.hpp"

using namespace pfc;
using std::numbers::pi;

namespace {

struct Grid {
  std::vector<double> t;
  double omega;
};

Grid make_grid(double omega, int periods, int per_period, double t0 = 0.0) {
  Grid g{{}, omega};
  const double T = 2 * pi / omega;
  for (int k = 0; k <= periods * per_period; ++k) g.t.push_back(t0 + k * T / per_period);
  return g;
}

template <typename F>
std::vector<double> sample(const Grid& g, F&& f) {
  std::vector<double> y;
  for (double t : g.t) y.push_back(f(t));
  return y;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("fourier coefficients of a pure tone") {
  const Grid g = make_grid(377.0, 3, 500, 0.01);
  const auto y = sample(g, [](double t) { return 2.0 * std::cos(2 * 377.0 * t) - 0.5 * std::sin(2 * 377.0 * t); });
  const FourierComponent c = fourier_component(g.t, y, 377.0, 2);
  CHECK(c.cos_coeff == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c.sin_coeff == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(std::abs(fourier_component(g.t, y, 377.0, 1).amplitude()) < 1e-12);
  CHECK(std::abs(window_mean(g.t, y)) < 1e-12);
}

TEST_CASE("window must cover whole periods") {
  Grid g = make_grid(377.0, 2, 400);
  g.t.pop_back();
  const auto y = sample(g, [](double t) { return std::sin(377.0 * t); });
  CHECK_THROWS_AS(fourier_component(g.t, y, 377.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(fourier_component(std::vector<double>{0.0}, std::vector<double>{1.0}, 377.0, 1),
                  std::invalid_argument);
}

TEST_CASE("power factor and thd of synthetic currents") {
  const double w = 2 * pi * 60;
  const Grid g = make_grid(w, 5, 2000);
  const auto vs = sample(g, [&](double t) { return 155.0 * std::sin(w * t); });

  const auto in_phase = sample(g, [&](double t) { return 7.0 * std::sin(w * t); });
  CHECK(power_factor(g.t, vs, in_phase) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(total_harmonic_distortion(g.t, in_phase, w) < 1e-12);

  for (double dr : {0.1, -0.4, 1.2}) {
    const auto lag = sample(g, [&](double t) { return 3.0 * std::sin(w * t - dr); });
    CHECK(power_factor(g.t, vs, lag) == doctest::Approx(std::cos(dr)).epsilon(1e-12));
  }

  const auto distorted = sample(g, [&](double t) {
    return std::sin(w * t) + 0.1 * std::sin(3 * w * t) + 0.05 * std::cos(5 * w * t);
  });
  CHECK(total_harmonic_distortion(g.t, distorted, w) ==
        doctest::Approx(std::sqrt(0.01 + 0.0025)).epsilon(1e-12));
  // Power factor with harmonics is the displacement factor times the
  // fundamental share of the RMS.
  CHECK(power_factor(g.t, vs, distorted) ==
        doctest::Approx(1.0 / std::sqrt(1.0 + 0.01 + 0.0025)).epsilon(1e-12));
}

TEST_CASE("compute_metrics on a synthetic steady trace") {
  testing::Gen gen(61);
  for (int n = 0; n < 20; ++n) {
    PlantParams p;
    p.E = gen.uniform(80, 300);
    const double K = gen.uniform(1e4, 9e4);
    const double A = gen.uniform(0.01, 0.5) * K;
    const double eps = gen.uniform(-pi, pi);
    const double Is = gen.uniform(1, 20), dr = gen.uniform(-1.0, 1.0);

    ScenarioConfig cfg;
    cfg.plant = p;
    cfg.mode = ControlMode::baseline;
    cfg.metrics_cycles = 5;

    const Grid g = make_grid(p.omega, 7, 1000, 0.0);
    std::vector<TraceRow> trace;
    for (double t : g.t) {
      TraceRow r;
      r.t = t;
      r.i = Is * std::sin(p.omega * t - dr);
      r.v = std::sqrt(K + A * std::sin(2 * p.omega * t + eps));
      trace.push_back(r);
    }
    const Metrics m = compute_metrics(trace, p, cfg);
    CHECK(m.window_cycles == 5);
    CHECK(testing::rel_err(m.v2_dc, K) < 1e-9);
    CHECK(testing::rel_err(m.v2_ripple_amplitude, A) < 1e-9);
    CHECK(std::abs(std::remainder(m.v2_ripple_phase - eps, 2 * pi)) < 1e-9);
    CHECK(testing::rel_err(m.i_fundamental, Is) < 1e-9);
    CHECK(m.i_phase_lag == doctest::Approx(dr).epsilon(1e-9));
    CHECK(m.power_factor == doctest::Approx(std::cos(dr)).epsilon(1e-9));
    CHECK(m.thd < 1e-9);
    CHECK(m.saturation_fraction == 0.0);
    CHECK(std::isnan(m.E_hat_rel_error));
    CHECK(std::isnan(m.eta_decay_slope));
  }
}

TEST_CASE("unaligned window start is interpolated") {
  PlantParams p;
  ScenarioConfig cfg;
  cfg.plant = p;
  cfg.mode = ControlMode::baseline;
  // 999 samples per period: the window start falls between rows.
  const Grid g = make_grid(p.omega, 6, 999, 0.0);
  std::vector<TraceRow> trace;
  for (double t : g.t) {
    TraceRow r;
    r.t = t * (1.0 + 1e-4);
    r.i = std::sin(p.omega * r.t);
    r.v = 200.0;
    trace.push_back(r);
  }
  const Metrics m = compute_metrics(trace, p, cfg);
  CHECK(m.v_dc_average == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(m.v2_dc == doctest::Approx(4e4).epsilon(1e-12));
  CHECK(m.power_factor == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("trace shorter than the window") {
  PlantParams p;
  ScenarioConfig cfg;
  cfg.plant = p;
  const Grid g = make_grid(p.omega, 3, 100);
  std::vector<TraceRow> trace;
  for (double t : g.t) trace.push_back(TraceRow{t});
  CHECK_THROWS_AS(compute_metrics(trace, p, cfg), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics(std::vector<TraceRow>(1), p, cfg), std::invalid_argument);
}

TEST_CASE("field list is stable") {
  const auto fields = metrics_fields(Metrics{});
  REQUIRE(fields.size() == 17);
  CHECK(fields.front().first == "window_cycles");
  CHECK(fields.back().first == "saturation_fraction");
}

}  // TEST_SUITE
