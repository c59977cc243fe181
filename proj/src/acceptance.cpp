#include "pfcsim/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <numbers>
#include <random>

#include "pfcsim/controller.hpp"
#include "pfcsim/estimator.hpp"
#include "pfcsim/simulation.hpp"
#include "pfcsim/steady_state.hpp"

namespace pfc {

namespace {

constexpr double kPi = std::numbers::pi;

std::string strf(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

struct Verdict {
  bool passed = true;
  std::string detail;

  void add(bool ok, const std::string& text) {
    passed = passed && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + text;
  }
  void note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

ScenarioConfig scenario(ControlMode mode, double cycles) {
  ScenarioConfig cfg;
  cfg.mode = mode;
  cfg.duration = cycles * cfg.plant.period();
  return cfg;
}

double relative(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

std::string abort_text(const AbortInfo& a) {
  return strf("aborted (%s) at t=%.6g: %s", to_string(a.kind), a.t, a.message.c_str());
}

// Runs a scenario that must complete. Returns nullopt-equivalent via the
// verdict when it aborts.
bool completed(const RunResult& r, Verdict& v, const char* label) {
  if (r.abort) {
    v.add(false, std::string(label) + " " + abort_text(*r.abort));
    return false;
  }
  if (!r.metrics) {
    v.add(false, std::string(label) + " produced no metrics");
    return false;
  }
  return true;
}

// ---- 1: algebraic identities -------------------------------------------

// mu' component by component for diagonal D.
Vec2 mu_components(const Vec2& mu, double v, double u, double t, double k, double d1, double d2,
                   const PlantParams& p) {
  const double uc = u / p.C;
  return {-k * (1.0 + d1) * uc * uc * mu(0) + std::sin(p.omega * t) / p.L,
          -k * (1.0 + d2) * uc * (uc * mu(1) - v / p.C)};
}

// Expanded steady v^2: DC term minus the cos and sin second harmonics.
double v_squared_expanded(double t, double dr, double Is, const PlantParams& p) {
  const double lw = p.L * p.omega;
  const double d1 = 0.5 * Is * (p.E * std::cos(dr) - lw * Is * std::sin(2 * dr));
  const double d2 = 0.5 * Is * (p.E * std::sin(dr) + lw * Is * std::cos(2 * dr));
  const double cw = p.C * p.omega;
  const double den = p.G * p.G + cw * cw;
  return p.E * Is / (2 * p.G) * std::cos(dr) - (p.G * d1 - cw * d2) / den * std::cos(2 * p.omega * t) -
         (p.G * d2 + cw * d1) / den * std::sin(2 * p.omega * t);
}

PlantParams random_plant(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return lo * std::pow(hi / lo, unit(rng));
  };
  PlantParams p;
  p.L = log_uniform(1e-4, 1e-2);
  p.C = log_uniform(1e-4, 1e-2);
  p.G = log_uniform(1e-3, 1e-1);
  p.E = log_uniform(50.0, 400.0);
  p.omega = 2 * kPi * log_uniform(40.0, 70.0);
  return p;
}

CriterionResult criterion_1(const AcceptanceOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  constexpr int kTrials = 2000;
  Verdict verdict;

  // (a) generic mu dynamics vs component forms, diagonal D.
  double worst_a = 0.0;
  for (int n = 0; n < kTrials; ++n) {
    const PlantParams p = random_plant(rng);
    EstimatorGains g;
    g.k = std::pow(10.0, in(-4, 0));
    const double d1 = in(0.1, 10.0), d2 = in(0.1, 10.0);
    g.D = Mat2{{d1, 0.0}, {0.0, d2}};
    const Vec2 mu(in(-1.0, 1.0), in(-500.0, 500.0));
    const double v = in(1.0, 400.0), u = in(-1.0, 1.0), t = in(0.0, 1.0);
    const Vec2 generic = mu_derivative(mu, v, u, t, g, p);
    const Vec2 comp = mu_components(mu, v, u, t, g.k, d1, d2, p);
    const double uc = u / p.C;
    const Vec2 scale(std::abs(g.k * (1 + d1) * uc * uc * mu(0)) + 1.0 / p.L,
                     std::abs(g.k * (1 + d2) * uc * uc * mu(1)) +
                         std::abs(g.k * (1 + d2) * uc * v / p.C));
    worst_a = std::max({worst_a, std::abs(generic(0) - comp(0)) / scale(0),
                        std::abs(generic(1) - comp(1)) / scale(1)});
  }
  verdict.add(worst_a <= 1e-12, strf("(a) mu forms max rel %.2e <= 1e-12", worst_a));

  // (b) compact vs expanded steady v^2.
  double worst_b = 0.0;
  for (int n = 0; n < kTrials / 20; ++n) {
    const PlantParams p = random_plant(rng);
    const OperatingPoint op{in(-1.5, 1.5), in(0.1, 50.0)};
    for (int s = 0; s < 100; ++s) {
      const double t = in(0.0, 2.0 * p.period());
      const double compact = steady_v_squared(t, op, p);
      const double expanded = v_squared_expanded(t, op.delta_rho, op.I_s, p);
      const double A = ripple_amplitude_phase(op, p.E, p.L, p.omega, p.G, p.C).A;
      const double ref = std::max(std::abs(expanded), A);
      worst_b = std::max(worst_b, std::abs(compact - expanded) / ref);
    }
  }
  verdict.add(worst_b <= 1e-9, strf("(b) v^2 forms max rel %.2e <= 1e-9", worst_b));

  // (c) E e == e_hat at the true parameters.
  double worst_c = 0.0;
  for (int n = 0; n < kTrials; ++n) {
    const PlantParams p = random_plant(rng);
    ControllerGains cg;
    cg.V_d = p.E * in(1.05, 2.0);
    cg.ell = in(0.0, 5.0);
    const double t = in(0.0, 1.0), i = in(-30.0, 30.0), u = in(-1.0, 1.0);
    const double v = in(1.0, 2.0 * cg.V_d);
    const double I0 = 2.0 * p.G * cg.V_d * cg.V_d / p.E;
    const double wt = p.omega * t;
    const double e = p.E * std::sin(wt) - p.L * I0 * p.omega * std::cos(wt) -
                     cg.ell * (I0 * std::sin(wt) - i) - u * v;
    const ScaledError se = scaled_error_estimate(t, p.E, p.G, i, u, v, cg, p.L, p.omega);
    worst_c = std::max(worst_c, std::abs(p.E * e - se.e_hat) / se.env.q_hat);
  }
  verdict.add(worst_c <= 1e-9, strf("(c) E*e vs e_hat max %.2e q_hat <= 1e-9 q_hat", worst_c));

  // (d) DC output of the required current is V_d.
  double worst_d = 0.0;
  for (int n = 0; n < kTrials; ++n) {
    const double dr = in(-kPi / 2 + 1e-3, kPi / 2 - 1e-3);
    const double G = std::pow(10.0, in(-3, -1)), E = in(50.0, 400.0);
    const double V_d = E * in(1.01, 3.0);
    const double Is = steady_current_amplitude(dr, G, V_d, E);
    worst_d = std::max(worst_d, relative(dc_output_voltage(dr, Is, E, G), V_d));
  }
  verdict.add(worst_d <= 1e-12, strf("(d) round trip max rel %.2e <= 1e-12", worst_d));

  return {1, acceptance_title(1), verdict.passed, verdict.detail, 0.0};
}

// ---- 2: error-dynamics equivalence -------------------------------------

CriterionResult criterion_2(const AcceptanceOptions&) {
  ScenarioConfig cfg = scenario(ControlMode::observer_only, 5.0);
  cfg.dt = 1e-6;
  cfg.stride = 100;
  double worst_pointwise = 0.0, worst_peak = 0.0, peak = 0.0, final_norm = 0.0;
  std::size_t samples = 0;
  const RunResult r = run_simulation(cfg, true, [&](const StepSample& s) {
    const double norm = s.eta_bar_linear.norm();
    const double diff = (s.eta_bar - s.eta_bar_linear).norm();
    peak = std::max(peak, norm);
    worst_pointwise = std::max(worst_pointwise, diff / norm);
    worst_peak = std::max(worst_peak, diff / peak);
    final_norm = norm;
    ++samples;
  });
  Verdict verdict;
  if (r.abort) {
    verdict.add(false, abort_text(*r.abort));
  } else {
    verdict.add(worst_pointwise <= 1e-6,
                strf("max |eta_bar - eta_bar_lin| / |eta_bar_lin| = %.2e <= 1e-6 over %zu steps",
                     worst_pointwise, samples));
    verdict.note(strf("relative to running peak %.2e; |eta_bar| %.3g -> %.3g", worst_peak, peak,
                      final_norm));
  }
  return {2, acceptance_title(2), verdict.passed, verdict.detail, 0.0};
}

// ---- 3: Lyapunov monitoring --------------------------------------------

struct LyapunovMonitor {
  double worst_rate = -INFINITY;      // max of V_dot
  double worst_increase = -INFINITY;  // max of (V_k - V_{k-1}) / V(segment start)
  std::size_t steps = 0;
  std::size_t segment_events = 0;
  double V_prev = 0.0;
  double V_start = 0.0;
  bool started = false;

  void operator()(const StepSample& s) {
    worst_rate = std::max(worst_rate, s.V_rate);
    if (!started || s.events_applied != segment_events) {
      // A parameter step moves the true eta; V restarts from there.
      segment_events = s.events_applied;
      V_start = s.V;
      started = true;
    } else if (V_start > 0.0) {
      worst_increase = std::max(worst_increase, (s.V - V_prev) / V_start);
    }
    V_prev = s.V;
    ++steps;
  }

  bool passed() const { return worst_rate <= 0.0 && worst_increase <= 1e-9; }
};

struct NamedScenario {
  std::string name;
  ScenarioConfig cfg;
};

std::vector<NamedScenario> model_matched_scenarios() {
  std::vector<NamedScenario> out;
  out.push_back({"observer-only", scenario(ControlMode::observer_only, 25.0)});
  out.push_back({"adaptive", scenario(ControlMode::adaptive, 60.0)});
  ScenarioConfig g_step = scenario(ControlMode::adaptive, 60.0);
  g_step.events.push_back({30.0 * g_step.plant.period(), Event::Target::G, 1.5 * g_step.plant.G});
  out.push_back({"adaptive G step", g_step});
  ScenarioConfig e_step = scenario(ControlMode::adaptive, 60.0);
  e_step.events.push_back({30.0 * e_step.plant.period(), Event::Target::E, 0.9 * e_step.plant.E});
  out.push_back({"adaptive E step", e_step});
  return out;
}

ScenarioConfig resistive_scenario() {
  ScenarioConfig cfg = scenario(ControlMode::adaptive, 60.0);
  cfg.plant.R_s = 0.5;
  return cfg;
}

ScenarioConfig switched_scenario() {
  ScenarioConfig cfg = scenario(ControlMode::adaptive, 60.0);
  cfg.model = PlantModel::switched;
  cfg.carrier_hz = 20000.0;
  cfg.dt = 5e-7;
  cfg.stride = 200;
  cfg.pe_stride = 1e-5;
  return cfg;
}

CriterionResult criterion_3(const AcceptanceOptions&) {
  Verdict verdict;
  for (const NamedScenario& sc : model_matched_scenarios()) {
    LyapunovMonitor mon;
    const RunResult r = run_scenario(sc.cfg, std::ref(mon));
    if (r.abort) {
      verdict.add(false, sc.name + " " + abort_text(*r.abort));
      continue;
    }
    verdict.add(mon.passed(), strf("%s: max V_dot %.3g <= 0, max step increase %.2e V0 <= 1e-9 V0",
                                   sc.name.c_str(), mon.worst_rate, mon.worst_increase));
  }
  // The resistive and switched plants are outside the estimator's model,
  // so the error no longer follows the linear error system and V need not
  // decrease. Monitored and reported, not asserted.
  for (auto& [name, cfg] : {NamedScenario{"R_s=0.5 (unmodelled)", resistive_scenario()},
                            NamedScenario{"switched (unmodelled ripple)", switched_scenario()}}) {
    LyapunovMonitor mon;
    const RunResult r = run_scenario(cfg, std::ref(mon));
    if (r.abort) {
      verdict.note(name + " " + abort_text(*r.abort));
      continue;
    }
    verdict.note(strf("info %s: max V_dot %.3g, max step increase %.2e V0", name.c_str(),
                      mon.worst_rate, mon.worst_increase));
  }
  return {3, acceptance_title(3), verdict.passed, verdict.detail, 0.0};
}

// ---- 4: estimator convergence ------------------------------------------

CriterionResult criterion_4(const AcceptanceOptions&) {
  const ScenarioConfig cfg = scenario(ControlMode::observer_only, 25.0);
  const RunResult r = run_scenario(cfg);
  Verdict verdict;
  if (completed(r, verdict, "observer-only")) {
    const PlantParams& p = cfg.plant;
    const double T = p.period();
    const double I0 = min_current_amplitude(p.G, cfg.controller.V_d, p.E);
    double e_err = 0.0, g_err = 0.0, i_err = 0.0, pe_min = INFINITY;
    for (const TraceRow& row : r.trace) {
      if (row.t >= 20.0 * T) {
        e_err = std::max(e_err, relative(row.E_hat, p.E));
        g_err = std::max(g_err, relative(row.G_hat, p.G));
        i_err = std::max(i_err, std::abs(row.i_hat - row.i));
      }
      if (row.t >= cfg.pe_config().T0 * (1.0 + 1e-9)) pe_min = std::min(pe_min, row.pe_min_eig);
    }
    verdict.add(e_err < 0.01, strf("max |E_hat-E|/E after 20T %.2e < 1e-2", e_err));
    verdict.add(g_err < 0.01, strf("max |G_hat-G|/G %.2e < 1e-2", g_err));
    verdict.add(i_err < 0.01 * I0, strf("max |i_hat-i| %.2e A < %.4g A", i_err, 0.01 * I0));
    verdict.add(r.metrics->eta_decay_slope < 0.0,
                strf("log|eta_bar| slope %.4g 1/s < 0", r.metrics->eta_decay_slope));
    verdict.add(pe_min > 0.0, strf("min windowed PE eigenvalue %.4g > 0", pe_min));
  }
  return {4, acceptance_title(4), verdict.passed, verdict.detail, 0.0};
}

// ---- 5, 7, 8: closed-loop regulation -----------------------------------

void regulation_checks(const ScenarioConfig& cfg, const Metrics& m, Verdict& verdict,
                       bool full) {
  const double V_d = cfg.controller.V_d;
  verdict.add(relative(m.v_dc_average, V_d) < 0.02,
              strf("v avg %.6g V within 2%% of %.6g", m.v_dc_average, V_d));
  verdict.add(m.power_factor >= 0.98, strf("PF %.6f >= 0.98", m.power_factor));
  if (full) {
    verdict.add(m.thd <= 0.10, strf("THD %.3e <= 0.10", m.thd));
    const double ripple_err = relative(m.v2_ripple_amplitude, m.v2_ripple_predicted);
    verdict.add(ripple_err < 0.05, strf("v^2 ripple %.6g vs predicted %.6g (rel %.2e < 5e-2)",
                                        m.v2_ripple_amplitude, m.v2_ripple_predicted, ripple_err));
  } else {
    verdict.note(strf("THD %.3e", m.thd));
  }
}

CriterionResult criterion_5(const AcceptanceOptions&) {
  const ScenarioConfig cfg = scenario(ControlMode::adaptive, 60.0);
  const RunResult r = run_scenario(cfg);
  Verdict verdict;
  if (completed(r, verdict, "adaptive")) regulation_checks(cfg, *r.metrics, verdict, true);
  return {5, acceptance_title(5), verdict.passed, verdict.detail, 0.0};
}

// ---- 6: disturbance rejection ------------------------------------------

CriterionResult criterion_6(const AcceptanceOptions&) {
  Verdict verdict;
  const auto scenarios = model_matched_scenarios();
  for (const NamedScenario& sc : scenarios) {
    if (sc.cfg.events.empty()) continue;
    const Event& ev = sc.cfg.events.front();
    const RunResult r = run_scenario(sc.cfg);
    if (!completed(r, verdict, sc.name.c_str())) continue;
    const double T = sc.cfg.plant.period();
    const bool is_G = ev.target == Event::Target::G;
    double worst = 0.0;
    double settled_at = ev.t;  // last time the error was >= 1 %
    for (const TraceRow& row : r.trace) {
      if (row.t < ev.t) continue;
      const double err = relative(is_G ? row.G_hat : row.E_hat, ev.value);
      if (err >= 0.01) settled_at = row.t;
      if (row.t >= ev.t + 20.0 * T) worst = std::max(worst, err);
    }
    verdict.add(worst < 0.01,
                strf("%s to %.6g: max rel error from step+20T to end %.2e < 1e-2 (within 1%% after "
                     "%.2f cycles)",
                     is_G ? "G" : "E", ev.value, worst, (settled_at - ev.t) / T));
  }
  return {6, acceptance_title(6), verdict.passed, verdict.detail, 0.0};
}

CriterionResult criterion_7(const AcceptanceOptions&) {
  const ScenarioConfig cfg = resistive_scenario();
  const RunResult r = run_scenario(cfg);
  Verdict verdict;
  if (completed(r, verdict, "R_s=0.5")) {
    regulation_checks(cfg, *r.metrics, verdict, false);
    const double E_hat = r.trace.back().E_hat;
    verdict.note(strf("E_hat settles at %.6g V (E = %.6g V)", E_hat, cfg.plant.E));
  }
  return {7, acceptance_title(7), verdict.passed, verdict.detail, 0.0};
}

CriterionResult criterion_8(const AcceptanceOptions&) {
  const ScenarioConfig averaged = scenario(ControlMode::adaptive, 60.0);
  const ScenarioConfig switched = switched_scenario();
  const RunResult ra = run_scenario(averaged);
  const RunResult rs = run_scenario(switched);
  Verdict verdict;
  if (completed(ra, verdict, "averaged") && completed(rs, verdict, "switched")) {
    const double va = ra.metrics->v_dc_average, vs = rs.metrics->v_dc_average;
    verdict.add(relative(vs, va) < 0.02,
                strf("switched v avg %.6g V vs averaged %.6g V (rel %.2e < 2e-2)", vs, va,
                     relative(vs, va)));
    verdict.note(strf("switched PF %.4f THD %.3e", rs.metrics->power_factor, rs.metrics->thd));
  }
  return {8, acceptance_title(8), verdict.passed, verdict.detail, 0.0};
}

}  // namespace

const char* acceptance_title(int id) {
  switch (id) {
    case 1: return "algebraic identity suite";
    case 2: return "error-dynamics oracle equivalence";
    case 3: return "Lyapunov monitoring";
    case 4: return "estimator convergence (observer-only)";
    case 5: return "closed-loop regulation (adaptive)";
    case 6: return "disturbance rejection";
    case 7: return "robustness with source resistance";
    case 8: return "averaged vs switched consistency";
    default: return "unknown criterion";
  }
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
  using Fn = CriterionResult (*)(const AcceptanceOptions&);
  static constexpr Fn kCriteria[] = {criterion_1, criterion_2, criterion_3, criterion_4,
                                     criterion_5, criterion_6, criterion_7, criterion_8};
  if (id < 1 || id > kAcceptanceCriteria) {
    return {id, acceptance_title(id), false, "no such criterion", 0.0};
  }
  const auto start = std::chrono::steady_clock::now();
  CriterionResult result;
  try {
    result = kCriteria[id - 1](opts);
  } catch (const std::exception& e) {
    result = {id, acceptance_title(id), false, std::string("error: ") + e.what(), 0.0};
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& opts, const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<int> ids = opts.only;
  if (ids.empty()) {
    for (int id = 1; id <= kAcceptanceCriteria; ++id) ids.push_back(id);
  }
  std::vector<CriterionResult> results;
  for (int id : ids) {
    results.push_back(run_criterion(id, opts));
    if (on_result) on_result(results.back());
  }
  return results;
}

std::string format_result_line(const CriterionResult& r) {
  return strf("[%s] %d %s (%.1f s): ", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(),
              r.seconds) +
         r.detail;
}

}  // namespace pfc
