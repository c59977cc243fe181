#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pfcsim/plant.hpp"
#include "pfcsim/trace.hpp"

namespace pfc {

struct ScenarioConfig;

/// Figures of merit over the final window of a run.
///
/// Estimator fields are NaN in baseline mode. The eta_bar figures rebuild
/// the estimation error from trace columns plus the configured ground truth.
struct Metrics {
  int window_cycles = 0;
  double power_factor = 0.0;
  double thd = 0.0;                 // fraction, harmonics 2..40
  double v_dc_average = 0.0;        // mean v over the last line period
  double v2_dc = 0.0;
  double v2_ripple_amplitude = 0.0; // 2 omega component of v^2
  double v2_ripple_phase = 0.0;     // eps in A sin(2 omega t + eps)
  double i_fundamental = 0.0;       // achieved I_s
  double i_phase_lag = 0.0;         // achieved delta_rho
  double v2_ripple_predicted = 0.0; // closed form at (delta_rho, I_s) achieved
  double E_hat_rel_error = 0.0;     // final |E_hat - E| / E
  double G_hat_rel_error = 0.0;
  double i_hat_max_error = 0.0;     // max |i_hat - i| over the window, A
  double eta_bar_final_norm = 0.0;
  double eta_decay_slope = 0.0;     // least-squares slope of log|eta_bar|, 1/s
  double pe_min_eig_min = 0.0;      // smallest windowed PE eigenvalue in the window
  double saturation_fraction = 0.0;
};

/// (name, value) pairs in a fixed order, used for the key-value file.
std::vector<std::pair<std::string, double>> metrics_fields(const Metrics& m);

/// y ~ cos_coeff cos(h w t) + sin_coeff sin(h w t) + ...
struct FourierComponent {
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;

  double amplitude() const;
};

/// Trapezoidal Fourier coefficient over [t.front(), t.back()]. The span must
/// be a whole number of fundamental periods; otherwise std::invalid_argument.
FourierComponent fourier_component(std::span<const double> t, std::span<const double> y,
                                   double omega, int harmonic);

/// Trapezoidal time average over [t.front(), t.back()].
double window_mean(std::span<const double> t, std::span<const double> y);

/// THD from harmonics 2..max_harmonic relative to the fundamental.
double total_harmonic_distortion(std::span<const double> t, std::span<const double> y,
                                 double omega, int max_harmonic = 40);

/// Real over apparent power of (v_s, i) sample pairs.
double power_factor(std::span<const double> t, std::span<const double> v_s,
                    std::span<const double> i);

/// p is the plant at t = 0; events and mode come from cfg. Throws
/// std::invalid_argument when the trace is shorter than the metrics window.
Metrics compute_metrics(std::span<const TraceRow> trace, const PlantParams& p,
                        const ScenarioConfig& cfg);

}  // namespace pfc
