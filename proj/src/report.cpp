#include "pfcsim/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <stdexcept>

namespace pfc {

namespace {

std::string fixed(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, value);
  return buf;
}

template <typename Writer>
void write_file(const std::string& path, const char* what, Writer&& writer) {
  if (path.empty()) return;
  if (path == "-") {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error(std::string("cannot open ") + what + " '" + path + "'");
  writer(out);
  if (!out) throw std::runtime_error(std::string("failed writing ") + what + " '" + path + "'");
}

}  // namespace

void write_metrics_file(std::ostream& out, const RunResult& result) {
  out << "status = " << (result.abort ? "aborted" : "ok") << '\n';
  if (result.abort) {
    out << "abort.kind = " << to_string(result.abort->kind) << '\n';
    out << "abort.t = " << format_double(result.abort->t) << '\n';
  }
  out << "rows = " << result.trace.size() << '\n';
  if (result.metrics) {
    for (const auto& [name, value] : metrics_fields(*result.metrics)) {
      out << name << " = " << format_double(value) << '\n';
    }
  }
}

void write_report(std::ostream& out, const ScenarioConfig& cfg, const RunResult& result) {
  const PlantParams& p = cfg.plant;
  out << "scenario\n";
  out << "  mode            " << to_string(cfg.mode) << '\n';
  out << "  plant model     " << to_string(cfg.model);
  if (cfg.model == PlantModel::switched) out << " (" << fixed(cfg.carrier_hz, 6) << " Hz carrier)";
  out << '\n';
  out << "  E, G, R_s       " << fixed(p.E, 6) << " V, " << fixed(p.G, 6) << " S, " << fixed(p.R_s, 6)
      << " ohm\n";
  out << "  L, C, omega     " << fixed(p.L, 6) << " H, " << fixed(p.C, 6) << " F, "
      << fixed(p.omega, 6) << " rad/s\n";
  out << "  V_d             " << fixed(cfg.controller.V_d, 6) << " V\n";
  out << "  dt, duration    " << fixed(cfg.dt, 6) << " s, " << fixed(cfg.duration, 6) << " s ("
      << fixed(cfg.duration / p.period(), 4) << " cycles)\n";
  for (const Event& e : cfg.events) {
    out << "  event           t = " << fixed(e.t, 6) << " s: " << to_string(e.target) << " -> "
        << fixed(e.value, 6) << '\n';
  }

  if (result.abort) {
    out << "\nABORTED (" << to_string(result.abort->kind) << ") at t = " << fixed(result.abort->t, 8)
        << " s\n  " << result.abort->message << '\n';
    out << "  " << result.trace.size() << " trace rows written before the abort\n";
    return;
  }
  if (!result.metrics) {
    out << "\nrun too short for the metrics window\n";
    return;
  }

  const Metrics& m = *result.metrics;
  out << "\nfinal " << m.window_cycles << " line cycles\n";
  out << "  power factor    " << fixed(m.power_factor, 8) << '\n';
  out << "  current THD     " << fixed(100.0 * m.thd, 4) << " %\n";
  out << "  v average       " << fixed(m.v_dc_average, 8) << " V (last cycle; target "
      << fixed(cfg.controller.V_d, 6) << " V)\n";
  out << "  v^2 DC          " << fixed(m.v2_dc, 8) << " V^2\n";
  out << "  v^2 ripple      " << fixed(m.v2_ripple_amplitude, 6) << " V^2 at 2w, phase "
      << fixed(m.v2_ripple_phase, 6) << " rad\n";
  out << "  predicted       " << fixed(m.v2_ripple_predicted, 6) << " V^2 at I_s = "
      << fixed(m.i_fundamental, 6) << " A, lag " << fixed(m.i_phase_lag, 4) << " rad\n";
  out << "  saturated       " << fixed(100.0 * m.saturation_fraction, 4) << " % of rows\n";
  if (cfg.mode != ControlMode::baseline) {
    out << "\nestimator\n";
    out << "  |E_hat - E| / E " << fixed(m.E_hat_rel_error, 4) << '\n';
    out << "  |G_hat - G| / G " << fixed(m.G_hat_rel_error, 4) << '\n';
    out << "  max |i_hat - i| " << fixed(m.i_hat_max_error, 4) << " A\n";
    out << "  |eta_bar| final " << fixed(m.eta_bar_final_norm, 4) << '\n';
    out << "  log decay slope " << fixed(m.eta_decay_slope, 6) << " 1/s\n";
    out << "  min PE eig      " << fixed(m.pe_min_eig_min, 6) << '\n';
  }
}

void write_oracle(std::ostream& out, const OperatingPoint& op, const PlantParams& p, double V_d) {
  const SteadyStateSummary s = summarize(op, p, V_d);
  out << "operating point  delta_rho = " << format_double(op.delta_rho)
      << " rad, I_s = " << format_double(op.I_s) << " A\n";
  out << "V_s   = " << format_double(s.V_s) << '\n';
  out << "I_0   = " << format_double(s.I_0) << '\n';
  out << "d1    = " << format_double(s.d1) << '\n';
  out << "d2    = " << format_double(s.d2) << '\n';
  out << "A     = " << format_double(s.A) << '\n';
  out << "eps   = " << format_double(s.eps) << (s.eps_degenerate ? "  (degenerate, I_s = 0)" : "")
      << '\n';
  out << "B     = " << format_double(s.B) << '\n';
  out << "delta = " << format_double(s.delta) << '\n';
}

void write_outputs(const ScenarioConfig& cfg, const RunResult& result) {
  write_file(cfg.trace_path, "trace", [&](std::ostream& o) { write_trace_csv(o, result.trace); });
  write_file(cfg.summary_path, "report", [&](std::ostream& o) { write_report(o, cfg, result); });
  write_file(cfg.metrics_path, "metrics file",
             [&](std::ostream& o) { write_metrics_file(o, result); });
}

}  // namespace pfc
