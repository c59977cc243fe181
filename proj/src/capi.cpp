#include "pfcsim/pfcsim.h"

#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pfcsim/acceptance.hpp"
#include "pfcsim/report.hpp"
#include "pfcsim/simulation.hpp"
#include "pfcsim/sweep.hpp"

struct pfc_scenario {
  pfc::ScenarioConfig cfg;
};

struct pfc_result {
  pfc::ScenarioConfig cfg;
  pfc::RunResult run;
  std::string abort_message;
};

namespace {

thread_local std::string g_last_error;

pfc_status fail(pfc_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Translate whatever escaped the core into a status code.
template <typename F>
pfc_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const pfc::ConfigError& e) {
    return fail(PFC_ERR_CONFIG, e.what());
  } catch (const pfc::NumericalAbort& e) {
    return fail(PFC_ERR_NUMERICAL, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(PFC_ERR_ARGUMENT, e.what());
  } catch (const std::runtime_error& e) {
    return fail(PFC_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(PFC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PFC_ERR_INTERNAL, "unknown error");
  }
}

pfc_status copy_out(const std::string& value, char* buf, size_t buf_size, size_t* needed) {
  if (needed) *needed = value.size() + 1;
  if (buf == nullptr) return PFC_OK;
  if (buf_size < value.size() + 1) return fail(PFC_ERR_ARGUMENT, "buffer too small");
  std::memcpy(buf, value.c_str(), value.size() + 1);
  return PFC_OK;
}

pfc_metrics to_c(const pfc::Metrics& m) {
  return {m.window_cycles,       m.power_factor,      m.thd,
          m.v_dc_average,        m.v2_dc,             m.v2_ripple_amplitude,
          m.v2_ripple_phase,     m.i_fundamental,     m.i_phase_lag,
          m.v2_ripple_predicted, m.E_hat_rel_error,   m.G_hat_rel_error,
          m.i_hat_max_error,     m.eta_bar_final_norm, m.eta_decay_slope,
          m.pe_min_eig_min,      m.saturation_fraction};
}

template <typename Writer>
void write_to(const char* path, Writer&& writer) {
  if (std::strcmp(path, "-") == 0) {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error(std::string("cannot open '") + path + "' for writing");
  writer(out);
  if (!out) throw std::runtime_error(std::string("failed writing '") + path + "'");
}

#define PFC_REQUIRE(cond, what) \
  if (!(cond)) return fail(PFC_ERR_ARGUMENT, what)

}  // namespace

extern "C" {

const char* pfc_version(void) { return "0.1.0"; }

const char* pfc_last_error(void) { return g_last_error.c_str(); }

const char* pfc_status_name(pfc_status status) {
  switch (status) {
    case PFC_OK: return "ok";
    case PFC_ERR_ARGUMENT: return "invalid argument";
    case PFC_ERR_CONFIG: return "configuration error";
    case PFC_ERR_NUMERICAL: return "numerical abort";
    case PFC_ERR_CHECK_FAILED: return "acceptance check failed";
    case PFC_ERR_IO: return "I/O error";
    case PFC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

pfc_status pfc_scenario_create(pfc_scenario** out) {
  PFC_REQUIRE(out, "null output handle");
  return guarded([&] {
    *out = new pfc_scenario{};
    return PFC_OK;
  });
}

void pfc_scenario_destroy(pfc_scenario* scenario) { delete scenario; }

pfc_status pfc_scenario_load_file(pfc_scenario* scenario, const char* path) {
  PFC_REQUIRE(scenario && path, "null argument");
  return guarded([&] {
    scenario->cfg = pfc::load_config_file(path, scenario->cfg);
    return PFC_OK;
  });
}

pfc_status pfc_scenario_load_string(pfc_scenario* scenario, const char* text) {
  PFC_REQUIRE(scenario && text, "null argument");
  return guarded([&] {
    scenario->cfg = pfc::parse_config(text, scenario->cfg);
    return PFC_OK;
  });
}

pfc_status pfc_scenario_set(pfc_scenario* scenario, const char* key, const char* value) {
  PFC_REQUIRE(scenario && key && value, "null argument");
  return guarded([&] {
    pfc::apply_setting(scenario->cfg, key, value);
    return PFC_OK;
  });
}

pfc_status pfc_scenario_get(const pfc_scenario* scenario, const char* key, char* buf,
                            size_t buf_size, size_t* needed) {
  PFC_REQUIRE(scenario && key, "null argument");
  return guarded([&] { return copy_out(pfc::get_setting(scenario->cfg, key), buf, buf_size, needed); });
}

pfc_status pfc_scenario_to_text(const pfc_scenario* scenario, char* buf, size_t buf_size,
                                size_t* needed) {
  PFC_REQUIRE(scenario, "null scenario");
  return guarded([&] { return copy_out(pfc::to_config_text(scenario->cfg), buf, buf_size, needed); });
}

pfc_status pfc_scenario_validate(const pfc_scenario* scenario) {
  PFC_REQUIRE(scenario, "null scenario");
  return guarded([&] {
    scenario->cfg.validate();
    return PFC_OK;
  });
}

size_t pfc_config_key_count(void) { return pfc::config_keys().size(); }

const char* pfc_config_key_name(size_t index) {
  const auto keys = pfc::config_keys();
  return index < keys.size() ? keys[index].name.data() : nullptr;
}

const char* pfc_config_key_help(size_t index) {
  const auto keys = pfc::config_keys();
  return index < keys.size() ? keys[index].help.data() : nullptr;
}

pfc_status pfc_run(const pfc_scenario* scenario, pfc_result** out) {
  PFC_REQUIRE(scenario && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto result = std::make_unique<pfc_result>();
    result->cfg = scenario->cfg;
    result->run = pfc::run_scenario(result->cfg);
    pfc_status status = PFC_OK;
    if (result->run.abort) {
      const pfc::AbortInfo& a = *result->run.abort;
      std::ostringstream msg;
      msg << to_string(a.kind) << " at t = " << pfc::format_double(a.t) << " s: " << a.message;
      result->abort_message = msg.str();
      status = fail(PFC_ERR_NUMERICAL, result->abort_message);
    }
    *out = result.release();
    return status;
  });
}

void pfc_result_destroy(pfc_result* result) { delete result; }

int pfc_result_aborted(const pfc_result* result) {
  return result != nullptr && result->run.abort.has_value();
}

const char* pfc_result_abort_message(const pfc_result* result) {
  return result != nullptr ? result->abort_message.c_str() : "";
}

int pfc_result_has_metrics(const pfc_result* result) {
  return result != nullptr && result->run.metrics.has_value();
}

pfc_status pfc_result_metrics(const pfc_result* result, pfc_metrics* out) {
  PFC_REQUIRE(result && out, "null argument");
  PFC_REQUIRE(result->run.metrics, "result has no metrics");
  *out = to_c(*result->run.metrics);
  return PFC_OK;
}

size_t pfc_result_row_count(const pfc_result* result) {
  return result != nullptr ? result->run.trace.size() : 0;
}

pfc_status pfc_result_row(const pfc_result* result, size_t index, pfc_trace_row* out) {
  PFC_REQUIRE(result && out, "null argument");
  PFC_REQUIRE(index < result->run.trace.size(), "row index out of range");
  const pfc::TraceRow& r = result->run.trace[index];
  *out = {r.t,     r.i,     r.v,      r.u,           r.i_hat,      r.E_hat,
          r.G_hat, r.mu1,   r.mu2,    r.zeta1,       r.zeta2,      r.zeta3,
          r.V_lyap, r.V_lyap_rate, r.e_or_e_hat, r.pe_min_eig, r.saturated ? 1 : 0};
  return PFC_OK;
}

pfc_status pfc_result_write_outputs(const pfc_result* result) {
  PFC_REQUIRE(result, "null result");
  return guarded([&] {
    pfc::write_outputs(result->cfg, result->run);
    return PFC_OK;
  });
}

pfc_status pfc_result_write_trace(const pfc_result* result, const char* path) {
  PFC_REQUIRE(result && path, "null argument");
  return guarded([&] {
    write_to(path, [&](std::ostream& o) { pfc::write_trace_csv(o, result->run.trace); });
    return PFC_OK;
  });
}

pfc_status pfc_result_write_metrics(const pfc_result* result, const char* path) {
  PFC_REQUIRE(result && path, "null argument");
  return guarded([&] {
    write_to(path, [&](std::ostream& o) { pfc::write_metrics_file(o, result->run); });
    return PFC_OK;
  });
}

pfc_status pfc_result_write_report(const pfc_result* result, const char* path) {
  PFC_REQUIRE(result && path, "null argument");
  return guarded([&] {
    write_to(path, [&](std::ostream& o) { pfc::write_report(o, result->cfg, result->run); });
    return PFC_OK;
  });
}

pfc_status pfc_metrics_from_trace(const pfc_scenario* scenario, const char* trace_path,
                                  pfc_metrics* out) {
  PFC_REQUIRE(scenario && trace_path && out, "null argument");
  return guarded([&] {
    const auto rows = pfc::read_trace_csv(std::string(trace_path));
    *out = to_c(pfc::compute_metrics(rows, scenario->cfg.plant, scenario->cfg));
    return PFC_OK;
  });
}

pfc_status pfc_oracle(const pfc_scenario* scenario, double delta_rho, double I_s,
                      pfc_steady_state* out) {
  PFC_REQUIRE(scenario && out, "null argument");
  return guarded([&] {
    const pfc::SteadyStateSummary s =
        pfc::summarize({delta_rho, I_s}, scenario->cfg.plant, scenario->cfg.controller.V_d);
    *out = {s.V_s, s.I_0, s.d1, s.d2, s.A, s.eps, s.eps_degenerate ? 1 : 0, s.B, s.delta};
    return PFC_OK;
  });
}

pfc_status pfc_required_current(const pfc_scenario* scenario, double delta_rho, double* I_s) {
  PFC_REQUIRE(scenario && I_s, "null argument");
  return guarded([&] {
    const pfc::ScenarioConfig& c = scenario->cfg;
    *I_s = pfc::steady_current_amplitude(delta_rho, c.plant.G, c.controller.V_d, c.plant.E);
    return PFC_OK;
  });
}

pfc_status pfc_oracle_write(const pfc_scenario* scenario, double delta_rho, double I_s,
                            const char* path) {
  PFC_REQUIRE(scenario && path, "null argument");
  return guarded([&] {
    std::ostringstream text;  // evaluate before touching the destination
    pfc::write_oracle(text, {delta_rho, I_s}, scenario->cfg.plant, scenario->cfg.controller.V_d);
    write_to(path, [&](std::ostream& o) { o << text.str(); });
    return PFC_OK;
  });
}

pfc_status pfc_check_run(const int* ids, size_t n_ids, uint64_t seed, pfc_check_callback callback,
                         void* user, size_t* n_failed) {
  PFC_REQUIRE(ids || n_ids == 0, "null id list");
  return guarded([&] {
    pfc::AcceptanceOptions opts;
    opts.seed = seed;
    for (size_t k = 0; k < n_ids; ++k) {
      if (ids[k] < 1 || ids[k] > pfc::kAcceptanceCriteria) {
        return fail(PFC_ERR_ARGUMENT, "no acceptance criterion " + std::to_string(ids[k]));
      }
      opts.only.push_back(ids[k]);
    }
    size_t failed = 0;
    pfc::run_acceptance(opts, [&](const pfc::CriterionResult& r) {
      if (!r.passed) ++failed;
      if (callback) callback(r.id, r.passed ? 1 : 0, pfc::format_result_line(r).c_str(), user);
    });
    if (n_failed) *n_failed = failed;
    return failed == 0 ? PFC_OK
                       : fail(PFC_ERR_CHECK_FAILED,
                              std::to_string(failed) + " acceptance criteria failed");
  });
}

pfc_status pfc_sweep_run(const pfc_scenario* base, const char* const* axes, size_t n_axes,
                         const char* grid_file, unsigned threads, const char* output_dir,
                         pfc_sweep_callback callback, void* user, size_t* n_points) {
  PFC_REQUIRE(base && (axes || n_axes == 0), "null argument");
  return guarded([&] {
    std::vector<pfc::SweepAxis> parsed;
    if (grid_file != nullptr) {
      std::ifstream in(grid_file);
      if (!in) throw pfc::ConfigError(std::string("cannot open grid file '") + grid_file + "'");
      std::stringstream text;
      text << in.rdbuf();
      parsed = pfc::parse_sweep_grid(text.str());
    }
    for (size_t k = 0; k < n_axes; ++k) parsed.push_back(pfc::parse_sweep_axis(axes[k]));
    if (parsed.empty()) throw pfc::ConfigError("sweep needs at least one axis");

    const auto points = pfc::expand_grid(base->cfg, parsed);
    if (n_points) *n_points = points.size();
    pfc::SweepOptions opts;
    opts.threads = threads;
    opts.output_dir = output_dir != nullptr ? output_dir : "";
    const auto outcomes = pfc::run_sweep(points, opts);

    bool aborted = false, errored = false;
    for (const pfc::SweepOutcome& o : outcomes) {
      std::string status = "ok";
      if (!o.error.empty()) {
        status = "error: " + o.error;
        errored = true;
      } else if (o.abort) {
        status = std::string("aborted:") + to_string(o.abort->kind);
        aborted = true;
      }
      std::string settings;
      for (const auto& [key, value] : o.settings) {
        if (!settings.empty()) settings += ' ';
        settings += key + '=' + value;
      }
      if (callback) callback(o.index, status.c_str(), settings.c_str(), user);
    }
    if (errored) return fail(PFC_ERR_IO, "some sweep points failed to write their outputs");
    if (aborted) return fail(PFC_ERR_NUMERICAL, "some sweep points aborted");
    return PFC_OK;
  });
}

}  // extern "C"
