#include "pfcsim/simulation.hpp"

#include <cmath>
#include <limits>
#include <span>

#include "pfcsim/controller.hpp"
#include "pfcsim/integrator.hpp"
#include "pfcsim/steady_state.hpp"

namespace pfc {

namespace {

enum Slot : int {
  kI = 0,
  kV = 1,
  kU = 2,
  kX1 = 3,
  kX2 = 4,
  kMu1 = 5,
  kMu2 = 6,
  kZeta = 7,    // 7..9
  kLinear = 10  // 10..12
};

double event_tolerance(double dt) { return 1e-9 * dt; }

}  // namespace

Simulator::Simulator(ScenarioConfig cfg, bool cosimulate_error)
    : cfg_(std::move(cfg)),
      cosimulate_(cosimulate_error),
      estimator_active_(cfg_.mode != ControlMode::baseline),
      params_(cfg_.plant) {
  cfg_.validate_structure();
  adaptive_gain_ = cfg_.controller.adaptive_gain(cfg_.plant.E);

  state_.setZero();
  state_[kI] = cfg_.plant_init.i;
  state_[kV] = cfg_.plant_init.v;
  state_[kU] = cfg_.controller_init.u;
  state_[kX1] = cfg_.controller_init.x(0);
  state_[kX2] = cfg_.controller_init.x(1);
  state_[kMu1] = cfg_.estimator_init.mu(0);
  state_[kMu2] = cfg_.estimator_init.mu(1);
  state_.segment<3>(kZeta) = cfg_.estimator_init.zeta;
  saturated_ = std::abs(state_[kU]) >= 1.0;

  const PEConfig pe = cfg_.pe_config();
  pe_every_ = static_cast<std::size_t>(std::llround(pe.stride / cfg_.dt));

  apply_due_events(0.0);

  if (cosimulate_) {
    const EstimatorState est = estimator_state();
    state_.segment<3>(kLinear) =
        true_eta(state_[kI], est.mu, Vec2(params_.E, params_.G)) - est.zeta -
        beta(state_[kV], state_[kU], est.mu, cfg_.estimator, params_);
  }
  record_pe_sample();
}

PlantState Simulator::plant_state() const { return {state_[kI], state_[kV]}; }

ControllerState Simulator::controller_state() const {
  ControllerState c;
  c.u = state_[kU];
  c.x << state_[kX1], state_[kX2];
  c.saturated = saturated_;
  return c;
}

EstimatorState Simulator::estimator_state() const {
  EstimatorState e;
  e.mu << state_[kMu1], state_[kMu2];
  e.zeta = state_.segment<3>(kZeta);
  return e;
}

Simulator::Evaluation Simulator::evaluate(const Bundle& s, double t) const {
  const double i = s[kI];
  const double v = s[kV];
  const double u = s[kU];
  const Vec2 x(s[kX1], s[kX2]);
  const Vec2 mu(s[kMu1], s[kMu2]);
  const Vec3 zeta = s.segment<3>(kZeta);
  const ControllerGains& cg = cfg_.controller;
  const EstimatorGains& eg = cfg_.estimator;

  Evaluation ev;
  ev.derivative.setZero();
  ev.regressor = build_regressor(v, u, mu, t, params_);
  if (estimator_active_) ev.est = estimates(zeta, v, u, mu, eg, params_);

  FilterOutput filter;
  double u_dot = 0.0;
  if (cfg_.mode == ControlMode::adaptive) {
    const ScaledError se = scaled_error_estimate(t, ev.est.E_hat(), ev.est.G_hat(), ev.est.i_hat,
                                                 u, v, cg, params_.L, params_.omega);
    ev.e = se.e_hat;
    filter = resonant_filter_step(x, ev.e, cg.a, cg.b, adaptive_gain_, params_.omega,
                                  cg.denominator_exponent);
    u_dot = adaptive_u_derivative(u, v, ev.est.i_hat, filter.w, params_.C, cg.v_min);
  } else {
    const double I0 = min_current_amplitude(params_.G, cg.V_d, params_.E);
    const DesiredCurrent ref = desired_current(t, I0, params_.omega);
    ev.e = tracking_error(source_voltage(t, params_.E, params_.omega), i, ref.i_d, ref.di_d_dt,
                          u, v, cg.ell, params_.L);
    filter = resonant_filter_step(x, ev.e, cg.a, cg.b, cg.c, params_.omega,
                                  cg.denominator_exponent);
    u_dot = u_derivative(u, v, i, filter.w, params_.C, cg.v_min);
  }

  const SaturationDecision sat = saturate_rate(u, u_dot);
  ev.u_dot = sat.u_dot;

  const PlantDerivative pd = cfg_.model == PlantModel::switched
                                 ? switched_derivative({i, v}, delta_, t, params_)
                                 : plant_derivative({i, v}, u, t, params_);
  ev.derivative[kI] = pd.di_dt;
  ev.derivative[kV] = pd.dv_dt;
  ev.derivative[kU] = sat.u_dot;
  if (!sat.hold) {
    ev.derivative[kX1] = filter.x_dot(0);
    ev.derivative[kX2] = filter.x_dot(1);
  }

  if (estimator_active_) {
    const Vec2 mu_dot = mu_derivative(mu, v, u, t, eg, params_);
    ev.derivative[kMu1] = mu_dot(0);
    ev.derivative[kMu2] = mu_dot(1);
    ev.derivative.segment<3>(kZeta) =
        zeta_derivative(zeta, v, u, sat.u_dot, mu, mu_dot, t, eg, params_);
  }
  if (cosimulate_) {
    ev.derivative.segment<3>(kLinear) =
        error_matrix(ev.regressor, eg) * s.segment<3>(kLinear);
  }
  return ev;
}

void Simulator::integrate(double t0, double t1) {
  state_ = rk4_step([this](const Bundle& s, double tau) { return evaluate(s, tau).derivative; },
                    state_, t0, t1 - t0);

  const double u = state_[kU];
  const double clamped = clamp_duty(u);
  if (clamped != u) {
    if (estimator_active_) {
      const Vec2 mu(state_[kMu1], state_[kMu2]);
      const double v = state_[kV];
      state_.segment<3>(kZeta) += beta(v, u, mu, cfg_.estimator, params_) -
                                  beta(v, clamped, mu, cfg_.estimator, params_);
    }
    state_[kU] = clamped;
    saturated_ = true;
  } else {
    saturated_ = std::abs(u) >= 1.0;
  }

  if (!state_.allFinite()) {
    throw NumericalAbort(AbortKind::non_finite, "state became non-finite", t1);
  }
  if (!(state_[kV] > 0.0)) {
    throw NumericalAbort(AbortKind::nonpositive_voltage,
                         "output voltage fell to " + format_double(state_[kV]) + " V", t1);
  }
}

void Simulator::apply_due_events(double t) {
  const double tol = event_tolerance(cfg_.dt);
  while (next_event_ < cfg_.events.size() && cfg_.events[next_event_].t <= t + tol) {
    const Event& e = cfg_.events[next_event_++];
    switch (e.target) {
      case Event::Target::G:
        params_.G = e.value;
        break;
      case Event::Target::E:
        params_.E = e.value;
        break;
      case Event::Target::R_s:
        params_.R_s = e.value;
        break;
    }
  }
}

void Simulator::step() {
  const double t_n = time();
  const double t_next = static_cast<double>(step_ + 1) * cfg_.dt;
  const double tol = event_tolerance(cfg_.dt);

  if (cfg_.model == PlantModel::switched) {
    const double cycles = (t_n + 0.5 * cfg_.dt) * cfg_.carrier_hz;
    delta_ = pwm_sample(state_[kU], cycles - std::floor(cycles));
  }

  double t_start = t_n;
  while (next_event_ < cfg_.events.size() && cfg_.events[next_event_].t < t_next - tol) {
    const double t_event = cfg_.events[next_event_].t;
    if (t_event > t_start + tol) {
      integrate(t_start, t_event);
      t_start = t_event;
    }
    apply_due_events(t_event);
  }
  integrate(t_start, t_next);

  ++step_;
  apply_due_events(time());
  if (step_ % pe_every_ == 0) record_pe_sample();
}

void Simulator::record_pe_sample() {
  if (!estimator_active_) return;
  const std::size_t window = cfg_.pe_config().intervals() + 1;
  const Vec2 mu(state_[kMu1], state_[kMu2]);
  pe_samples_.push_back(build_regressor(state_[kV], state_[kU], mu, time(), params_).C2);
  if (pe_samples_.size() >= 2 * window) {
    pe_samples_.erase(pe_samples_.begin(),
                      pe_samples_.begin() + static_cast<std::ptrdiff_t>(pe_samples_.size() - window));
  }
}

double Simulator::windowed_pe_min_eig() const {
  if (!estimator_active_) return 0.0;
  PEConfig pe = cfg_.pe_config();
  const std::size_t window = pe.intervals() + 1;
  if (pe_samples_.size() < window) return 0.0;
  std::span<const Vec2> recent(pe_samples_.data() + (pe_samples_.size() - window), window);
  return pe_gram(recent, pe).min_eigenvalue;
}

TraceRow Simulator::row() const {
  const double t = time();
  TraceRow r;
  r.t = t;
  r.i = state_[kI];
  r.v = state_[kV];
  r.u = state_[kU];
  r.saturated = saturated_;
  const EstimatorState est = estimator_state();
  Estimates now;
  try {
    const Evaluation ev = evaluate(state_, t);
    r.e_or_e_hat = ev.e;
    now = ev.est;
  } catch (const NumericalAbort&) {
    // Singular state: the control error is undefined, the rest is still valid.
    r.e_or_e_hat = std::numeric_limits<double>::quiet_NaN();
    if (estimator_active_) now = estimates(est.zeta, r.v, r.u, est.mu, cfg_.estimator, params_);
  }
  if (estimator_active_) {
    r.i_hat = now.i_hat;
    r.E_hat = now.E_hat();
    r.G_hat = now.G_hat();
    r.mu1 = est.mu(0);
    r.mu2 = est.mu(1);
    r.zeta1 = est.zeta(0);
    r.zeta2 = est.zeta(1);
    r.zeta3 = est.zeta(2);
    const ErrorDiagnostics diag =
        error_diagnostics(r.i, Vec2(params_.E, params_.G), est, r.v, r.u, t, cfg_.estimator, params_);
    r.V_lyap = diag.V;
    r.V_lyap_rate = diag.V_dot;
    r.pe_min_eig = windowed_pe_min_eig();
  }
  return r;
}

StepSample Simulator::sample() const {
  StepSample s;
  s.t = time();
  s.step = step_;
  s.events_applied = next_event_;
  s.plant = plant_state();
  s.u = state_[kU];
  s.saturated = saturated_;
  const EstimatorState est = estimator_state();
  s.regressor = build_regressor(s.plant.v, s.u, est.mu, s.t, params_);
  if (estimator_active_) {
    s.estimates = estimates(est.zeta, s.plant.v, s.u, est.mu, cfg_.estimator, params_);
    const ErrorDiagnostics diag = error_diagnostics(s.plant.i, Vec2(params_.E, params_.G), est,
                                                    s.plant.v, s.u, s.t, cfg_.estimator, params_);
    s.eta_bar = diag.eta_bar;
    s.V = diag.V;
    s.V_rate = diag.V_dot;
  }
  if (cosimulate_) s.eta_bar_linear = state_.segment<3>(kLinear);
  return s;
}

RunResult run_simulation(const ScenarioConfig& cfg, bool cosimulate_error,
                         const StepObserver& observer) {
  Simulator sim(cfg, cosimulate_error);
  RunResult result;
  const auto steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
  const auto stride = static_cast<std::size_t>(cfg.stride);
  result.trace.reserve(steps / stride + 2);

  auto emit = [&] {
    const bool last = sim.step_index() == steps;
    if (sim.step_index() % stride == 0 || last) result.trace.push_back(sim.row());
    if (observer) observer(sim.sample());
  };

  try {
    emit();
    while (sim.step_index() < steps) {
      sim.step();
      emit();
    }
  } catch (const NumericalAbort& e) {
    result.abort = AbortInfo{e.kind(), std::isnan(e.time()) ? sim.time() : e.time(), e.what()};
    return result;
  }

  const double covered = result.trace.back().t - result.trace.front().t;
  if (covered >= cfg.metrics_cycles * cfg.plant.period() * (1.0 - 1e-9)) {
    result.metrics = compute_metrics(result.trace, cfg.plant, cfg);
  }
  return result;
}

RunResult run_scenario(const ScenarioConfig& cfg, const StepObserver& observer) {
  cfg.validate();
  return run_simulation(cfg, false, observer);
}

}  // namespace pfc
