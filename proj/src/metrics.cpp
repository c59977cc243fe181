#include "pfcsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pfcsim/config.hpp"
#include "pfcsim/steady_state.hpp"

namespace pfc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_same_size(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size() || t.size() < 2) {
    throw std::invalid_argument("need at least two matching time/value samples");
  }
}

template <typename F>
double trapezoid(std::span<const double> t, F&& f) {
  double sum = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) sum += 0.5 * (t[k] - t[k - 1]) * (f(k) + f(k - 1));
  return sum;
}

/// Rows covering exactly [t_end - span, t_end], first row interpolated.
std::vector<TraceRow> tail_window(std::span<const TraceRow> trace, double span) {
  const double t_end = trace.back().t;
  const double t_begin = t_end - span;
  const double tol = 1e-9 * std::max(1.0, std::abs(t_end));
  if (t_begin < trace.front().t - tol) {
    throw std::invalid_argument("trace shorter than the metrics window");
  }
  auto it = std::lower_bound(trace.begin(), trace.end(), t_begin - tol,
                             [](const TraceRow& r, double t) { return r.t < t; });
  std::vector<TraceRow> out;
  if (std::abs(it->t - t_begin) > tol) {
    out.push_back(interpolate(*(it - 1), *it, t_begin));
  }
  out.insert(out.end(), it, trace.end());
  return out;
}

template <typename F>
std::vector<double> column(const std::vector<TraceRow>& rows, F&& f) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const TraceRow& r : rows) out.push_back(f(r));
  return out;
}

double linear_fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 3) return kNaN;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : kNaN;
}

}  // namespace

double FourierComponent::amplitude() const { return std::hypot(cos_coeff, sin_coeff); }

std::vector<std::pair<std::string, double>> metrics_fields(const Metrics& m) {
  return {
      {"window_cycles", static_cast<double>(m.window_cycles)},
      {"power_factor", m.power_factor},
      {"thd", m.thd},
      {"v_dc_average", m.v_dc_average},
      {"v2_dc", m.v2_dc},
      {"v2_ripple_amplitude", m.v2_ripple_amplitude},
      {"v2_ripple_phase", m.v2_ripple_phase},
      {"v2_ripple_predicted", m.v2_ripple_predicted},
      {"i_fundamental", m.i_fundamental},
      {"i_phase_lag", m.i_phase_lag},
      {"E_hat_rel_error", m.E_hat_rel_error},
      {"G_hat_rel_error", m.G_hat_rel_error},
      {"i_hat_max_error", m.i_hat_max_error},
      {"eta_bar_final_norm", m.eta_bar_final_norm},
      {"eta_decay_slope", m.eta_decay_slope},
      {"pe_min_eig_min", m.pe_min_eig_min},
      {"saturation_fraction", m.saturation_fraction},
  };
}

FourierComponent fourier_component(std::span<const double> t, std::span<const double> y,
                                   double omega, int harmonic) {
  require_same_size(t, y);
  const double span = t.back() - t.front();
  const double cycles = span * omega / (2.0 * std::numbers::pi);
  if (cycles < 1.0 - 1e-9 || std::abs(cycles - std::round(cycles)) > 1e-9 * cycles) {
    throw std::invalid_argument("Fourier window must span a whole number of line cycles");
  }
  const double hw = harmonic * omega;
  FourierComponent c;
  c.cos_coeff = 2.0 / span * trapezoid(t, [&](std::size_t k) { return y[k] * std::cos(hw * t[k]); });
  c.sin_coeff = 2.0 / span * trapezoid(t, [&](std::size_t k) { return y[k] * std::sin(hw * t[k]); });
  return c;
}

double window_mean(std::span<const double> t, std::span<const double> y) {
  require_same_size(t, y);
  return trapezoid(t, [&](std::size_t k) { return y[k]; }) / (t.back() - t.front());
}

double total_harmonic_distortion(std::span<const double> t, std::span<const double> y,
                                 double omega, int max_harmonic) {
  const double fundamental = fourier_component(t, y, omega, 1).amplitude();
  // Stay below Nyquist of the sample grid.
  const double period = 2.0 * std::numbers::pi / omega;
  const double spacing = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  const int nyquist = static_cast<int>(std::floor(0.5 * period / spacing)) - 1;
  const int top = std::min(max_harmonic, nyquist);
  double sum = 0.0;
  for (int h = 2; h <= top; ++h) {
    const double a = fourier_component(t, y, omega, h).amplitude();
    sum += a * a;
  }
  return fundamental > 0.0 ? std::sqrt(sum) / fundamental : kNaN;
}

double power_factor(std::span<const double> t, std::span<const double> v_s,
                    std::span<const double> i) {
  require_same_size(t, v_s);
  require_same_size(t, i);
  const double p = trapezoid(t, [&](std::size_t k) { return v_s[k] * i[k]; });
  const double vv = trapezoid(t, [&](std::size_t k) { return v_s[k] * v_s[k]; });
  const double ii = trapezoid(t, [&](std::size_t k) { return i[k] * i[k]; });
  return (vv > 0.0 && ii > 0.0) ? p / std::sqrt(vv * ii) : kNaN;
}

Metrics compute_metrics(std::span<const TraceRow> trace, const PlantParams& p,
                        const ScenarioConfig& cfg) {
  if (trace.size() < 2) throw std::invalid_argument("trace has fewer than two rows");
  ScenarioConfig truth = cfg;
  truth.plant = p;
  const double omega = p.omega;
  const double period = p.period();

  Metrics m;
  m.window_cycles = cfg.metrics_cycles;
  const auto window = tail_window(trace, cfg.metrics_cycles * period);
  const auto t = column(window, [](const TraceRow& r) { return r.t; });
  const auto i = column(window, [](const TraceRow& r) { return r.i; });
  const auto v2 = column(window, [](const TraceRow& r) { return r.v * r.v; });
  const auto v_s = column(window, [&](const TraceRow& r) {
    return source_voltage(r.t, params_at(truth, r.t).E, omega);
  });

  m.power_factor = power_factor(t, v_s, i);
  m.thd = total_harmonic_distortion(t, i, omega);

  const auto last = tail_window(trace, period);
  m.v_dc_average = window_mean(column(last, [](const TraceRow& r) { return r.t; }),
                               column(last, [](const TraceRow& r) { return r.v; }));

  m.v2_dc = window_mean(t, v2);
  const FourierComponent ripple = fourier_component(t, v2, omega, 2);
  m.v2_ripple_amplitude = ripple.amplitude();
  // A sin(2wt + eps) = A sin(eps) cos(2wt) + A cos(eps) sin(2wt)
  m.v2_ripple_phase = std::atan2(ripple.cos_coeff, ripple.sin_coeff);

  // I sin(wt - dr) = -I sin(dr) cos(wt) + I cos(dr) sin(wt)
  const FourierComponent fund = fourier_component(t, i, omega, 1);
  m.i_fundamental = fund.amplitude();
  m.i_phase_lag = std::atan2(-fund.cos_coeff, fund.sin_coeff);

  const PlantParams p_end = params_at(truth, trace.back().t);
  if (std::abs(m.i_phase_lag) < 0.5 * std::numbers::pi) {
    m.v2_ripple_predicted =
        ripple_amplitude_phase({m.i_phase_lag, m.i_fundamental}, p_end.E, p_end.L, omega,
                               p_end.G, p_end.C)
            .A;
  } else {
    m.v2_ripple_predicted = kNaN;
  }

  std::size_t saturated = 0;
  for (const TraceRow& r : trace) saturated += r.saturated ? 1 : 0;
  m.saturation_fraction = static_cast<double>(saturated) / static_cast<double>(trace.size());

  m.pe_min_eig_min = kNaN;
  if (cfg.mode == ControlMode::baseline) {
    m.E_hat_rel_error = m.G_hat_rel_error = m.i_hat_max_error = kNaN;
    m.eta_bar_final_norm = m.eta_decay_slope = kNaN;
    return m;
  }

  const TraceRow& fin = trace.back();
  m.E_hat_rel_error = std::abs(fin.E_hat - p_end.E) / p_end.E;
  m.G_hat_rel_error = std::abs(fin.G_hat - p_end.G) / p_end.G;
  m.i_hat_max_error = 0.0;
  m.pe_min_eig_min = std::numeric_limits<double>::infinity();
  for (const TraceRow& r : window) {
    m.i_hat_max_error = std::max(m.i_hat_max_error, std::abs(r.i_hat - r.i));
    m.pe_min_eig_min = std::min(m.pe_min_eig_min, r.pe_min_eig);
  }

  auto eta_norm = [&](const TraceRow& r) {
    const PlantParams q = params_at(truth, r.t);
    const double d_e = q.E - r.E_hat;
    const double d_g = q.G - r.G_hat;
    const double d_iota = r.i - r.i_hat - (r.mu1 * d_e + r.mu2 * d_g);
    return std::sqrt(d_iota * d_iota + d_e * d_e + d_g * d_g);
  };
  m.eta_bar_final_norm = eta_norm(fin);

  // Fit the initial decay: up to the first event, stopping once the error
  // has fallen eight decades below its running peak (numerical floor).
  const double fit_end = cfg.events.empty() ? fin.t : cfg.events.front().t;
  std::vector<double> xs, ys;
  double peak = 0.0;
  for (const TraceRow& r : trace) {
    if (r.t >= fit_end) break;
    const double n = eta_norm(r);
    peak = std::max(peak, n);
    if (!(n > 1e-8 * peak)) break;
    xs.push_back(r.t);
    ys.push_back(std::log(n));
  }
  m.eta_decay_slope = linear_fit_slope(xs, ys);
  return m;
}

}  // namespace pfc
