#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pfcsim/config.hpp"
#include "pfcsim/errors.hpp"
#include "pfcsim/metrics.hpp"
#include "pfcsim/trace.hpp"

namespace pfc {

/// Per-step view handed to a StepObserver (after every integration step and
/// once at t = 0). The error fields need ground truth and are zero in
/// baseline mode.
struct StepSample {
  double t = 0.0;
  std::size_t step = 0;
  std::size_t events_applied = 0;
  PlantState plant;
  double u = 0.0;
  bool saturated = false;
  Estimates estimates;
  Regressor regressor;
  Vec3 eta_bar = Vec3::Zero();         // eta - zeta - beta from ground truth
  Vec3 eta_bar_linear = Vec3::Zero();  // co-simulated eta_bar' = M(t) eta_bar
  double V = 0.0;
  double V_rate = 0.0;
};

using StepObserver = std::function<void(const StepSample&)>;

struct AbortInfo {
  AbortKind kind = AbortKind::non_finite;
  double t = 0.0;
  std::string message;
};

struct RunResult {
  std::vector<TraceRow> trace;
  std::optional<Metrics> metrics;  // empty when aborted
  std::optional<AbortInfo> abort;
};

/// Fixed-step RK4 integration of plant, controller and estimator as one
/// coupled system.
///
/// State bundle: (i, v, u, x1, x2, mu1, mu2, zeta1..3) plus, when error
/// co-simulation is on, the linear error system (eta_bar1..3). Events split
/// the step they fall in. After each (sub)step u is clamped to [-1, 1] and
/// zeta is shifted so that zeta + beta is unchanged by the clamp.
class Simulator {
 public:
  static constexpr int kStateSize = 13;
  using Bundle = Eigen::Matrix<double, kStateSize, 1>;

  /// Validates cfg except for the minimum duration. Throws ConfigError.
  explicit Simulator(ScenarioConfig cfg, bool cosimulate_error = false);

  double time() const { return static_cast<double>(step_) * cfg_.dt; }
  std::size_t step_index() const { return step_; }
  const ScenarioConfig& config() const { return cfg_; }
  const PlantParams& params() const { return params_; }
  const Bundle& bundle() const { return state_; }

  PlantState plant_state() const;
  ControllerState controller_state() const;
  EstimatorState estimator_state() const;

  /// Advance one integration step. Throws NumericalAbort.
  void step();

  TraceRow row() const;
  StepSample sample() const;

 private:
  struct Evaluation {
    Bundle derivative;
    Estimates est;
    Regressor regressor;
    double e = 0.0;
    double u_dot = 0.0;
  };

  Evaluation evaluate(const Bundle& s, double t) const;
  void integrate(double t0, double t1);
  void apply_due_events(double t);
  void record_pe_sample();
  double windowed_pe_min_eig() const;

  ScenarioConfig cfg_;
  bool cosimulate_;
  bool estimator_active_;
  PlantParams params_;
  double adaptive_gain_;
  Bundle state_;
  std::size_t step_ = 0;
  std::size_t next_event_ = 0;
  int delta_ = 0;
  bool saturated_ = false;
  std::size_t pe_every_ = 1;
  std::vector<Vec2> pe_samples_;
};

/// Validate (including the 10-period minimum) and run to completion,
/// computing metrics. Numerical aborts are reported in the result, not thrown.
RunResult run_scenario(const ScenarioConfig& cfg, const StepObserver& observer = {});

/// Like run_scenario but without the minimum-duration rule, optionally with
/// the linear error system co-simulated. Metrics are computed only when the
/// run covers the metrics window.
RunResult run_simulation(const ScenarioConfig& cfg, bool cosimulate_error,
                         const StepObserver& observer = {});

}  // namespace pfc
