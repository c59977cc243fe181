/* C interface to the PFC simulation library.
 *
 * Objects are opaque handles. Every call that can fail returns a
 * pfc_status; the message for the most recent failure on the calling
 * thread is available from pfc_last_error(). Paths given as "-" mean
 * standard output.
 */
#ifndef PFCSIM_PFCSIM_H
#define PFCSIM_PFCSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(PFCSIM_BUILDING_LIBRARY)
#define PFCSIM_API __attribute__((visibility("default")))
#else
#define PFCSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pfc_status {
  PFC_OK = 0,
  PFC_ERR_ARGUMENT = 1,     /* bad argument (null handle, index out of range, ...) */
  PFC_ERR_CONFIG = 2,       /* invalid configuration */
  PFC_ERR_NUMERICAL = 3,    /* run aborted: singularity, non-finite state, v <= 0 */
  PFC_ERR_CHECK_FAILED = 4, /* at least one acceptance criterion failed */
  PFC_ERR_IO = 5,
  PFC_ERR_INTERNAL = 6
} pfc_status;

typedef struct pfc_scenario pfc_scenario;
typedef struct pfc_result pfc_result;

typedef struct pfc_metrics {
  int window_cycles;
  double power_factor;
  double thd;
  double v_dc_average;
  double v2_dc;
  double v2_ripple_amplitude;
  double v2_ripple_phase;
  double i_fundamental;
  double i_phase_lag;
  double v2_ripple_predicted;
  double E_hat_rel_error;
  double G_hat_rel_error;
  double i_hat_max_error;
  double eta_bar_final_norm;
  double eta_decay_slope;
  double pe_min_eig_min;
  double saturation_fraction;
} pfc_metrics;

typedef struct pfc_trace_row {
  double t, i, v, u;
  double i_hat, E_hat, G_hat;
  double mu1, mu2;
  double zeta1, zeta2, zeta3;
  double V_lyap, V_lyap_rate;
  double e_or_e_hat;
  double pe_min_eig;
  int saturated;
} pfc_trace_row;

typedef struct pfc_steady_state {
  double V_s, I_0, d1, d2, A, eps;
  int eps_degenerate;
  double B, delta;
} pfc_steady_state;

PFCSIM_API const char* pfc_version(void);
PFCSIM_API const char* pfc_last_error(void);
PFCSIM_API const char* pfc_status_name(pfc_status status);

/* Scenario configuration */
PFCSIM_API pfc_status pfc_scenario_create(pfc_scenario** out);
PFCSIM_API void pfc_scenario_destroy(pfc_scenario* scenario);
PFCSIM_API pfc_status pfc_scenario_load_file(pfc_scenario* scenario, const char* path);
PFCSIM_API pfc_status pfc_scenario_load_string(pfc_scenario* scenario, const char* text);
PFCSIM_API pfc_status pfc_scenario_set(pfc_scenario* scenario, const char* key, const char* value);
/* Copies the value (NUL-terminated) into buf when it fits; *needed gets the
 * size including the terminator. buf may be NULL to query the size. */
PFCSIM_API pfc_status pfc_scenario_get(const pfc_scenario* scenario, const char* key, char* buf,
                                       size_t buf_size, size_t* needed);
PFCSIM_API pfc_status pfc_scenario_to_text(const pfc_scenario* scenario, char* buf,
                                           size_t buf_size, size_t* needed);
PFCSIM_API pfc_status pfc_scenario_validate(const pfc_scenario* scenario);

PFCSIM_API size_t pfc_config_key_count(void);
PFCSIM_API const char* pfc_config_key_name(size_t index);
PFCSIM_API const char* pfc_config_key_help(size_t index);

/* Simulation. On PFC_ERR_NUMERICAL *out still receives the partial result
 * (trace up to the abort). */
PFCSIM_API pfc_status pfc_run(const pfc_scenario* scenario, pfc_result** out);
PFCSIM_API void pfc_result_destroy(pfc_result* result);
PFCSIM_API int pfc_result_aborted(const pfc_result* result);
PFCSIM_API const char* pfc_result_abort_message(const pfc_result* result);
PFCSIM_API int pfc_result_has_metrics(const pfc_result* result);
PFCSIM_API pfc_status pfc_result_metrics(const pfc_result* result, pfc_metrics* out);
PFCSIM_API size_t pfc_result_row_count(const pfc_result* result);
PFCSIM_API pfc_status pfc_result_row(const pfc_result* result, size_t index, pfc_trace_row* out);
/* Writes to the output.* paths of the scenario the result came from. */
PFCSIM_API pfc_status pfc_result_write_outputs(const pfc_result* result);
PFCSIM_API pfc_status pfc_result_write_trace(const pfc_result* result, const char* path);
PFCSIM_API pfc_status pfc_result_write_metrics(const pfc_result* result, const char* path);
PFCSIM_API pfc_status pfc_result_write_report(const pfc_result* result, const char* path);

/* Metrics recomputed from a trace file written for this scenario. */
PFCSIM_API pfc_status pfc_metrics_from_trace(const pfc_scenario* scenario, const char* trace_path,
                                             pfc_metrics* out);

/* Steady-state predictions for the scenario's plant and V_d. */
PFCSIM_API pfc_status pfc_oracle(const pfc_scenario* scenario, double delta_rho, double I_s,
                                 pfc_steady_state* out);
/* Current amplitude that puts the DC output at V_d for the given lag. */
PFCSIM_API pfc_status pfc_required_current(const pfc_scenario* scenario, double delta_rho,
                                           double* I_s);
PFCSIM_API pfc_status pfc_oracle_write(const pfc_scenario* scenario, double delta_rho, double I_s,
                                       const char* path);

/* Acceptance suite. ids may be NULL (n_ids = 0) for every criterion. The
 * callback gets one formatted line per criterion. Returns
 * PFC_ERR_CHECK_FAILED when any criterion fails. */
typedef void (*pfc_check_callback)(int id, int passed, const char* line, void* user);
PFCSIM_API pfc_status pfc_check_run(const int* ids, size_t n_ids, uint64_t seed,
                                    pfc_check_callback callback, void* user, size_t* n_failed);

/* Parameter sweep over "key=v1,v2" axes and/or a grid file (may be NULL).
 * The callback gets index, status ("ok", "aborted:<kind>", "error") and the
 * swept settings as text. Returns PFC_ERR_NUMERICAL when any point aborted
 * and PFC_ERR_IO when any point failed to write its outputs. */
typedef void (*pfc_sweep_callback)(size_t index, const char* status, const char* settings,
                                   void* user);
PFCSIM_API pfc_status pfc_sweep_run(const pfc_scenario* base, const char* const* axes,
                                    size_t n_axes, const char* grid_file, unsigned threads,
                                    const char* output_dir, pfc_sweep_callback callback,
                                    void* user, size_t* n_points);

#ifdef __cplusplus
}
#endif

#endif /* PFCSIM_PFCSIM_H */
