/* C API for the cdmr constraint-driven multi-robot control library.
 *
 * Opaque handles + status codes; every function returns cdmr_status.
 * On failure cdmr_last_error() carries a thread-local message. Handles
 * must be released with the matching *_free call.
 */
#ifndef CDMR_H
#define CDMR_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct cdmr_scenario cdmr_scenario;
typedef struct cdmr_run cdmr_run;

typedef enum cdmr_status {
  CDMR_OK = 0,
  CDMR_ERR_INVALID_ARG = 1,
  CDMR_ERR_VALIDATION = 2, /* schema or invariant violation in the input */
  CDMR_ERR_INFEASIBLE = 3, /* a robot QP admits no input */
  CDMR_ERR_NUMERIC = 4,
  CDMR_ERR_IO = 5,
  CDMR_ERR_INTERNAL = 6
} cdmr_status;

/* Last error message for the calling thread ("" when the last call
 * succeeded). The pointer stays valid until the next API call on the
 * same thread. */
const char* cdmr_last_error(void);

/* ---- scenarios ---- */
cdmr_status cdmr_scenario_from_file(const char* path, cdmr_scenario** out);
cdmr_status cdmr_scenario_from_json(const char* json_text, cdmr_scenario** out);
cdmr_status cdmr_scenario_preset(const char* name, cdmr_scenario** out);
void cdmr_scenario_free(cdmr_scenario* scenario);

/* Number of built-in presets / the name of preset `index`. The returned
 * pointer is owned by the library and stays valid for the process. */
size_t cdmr_preset_count(void);
const char* cdmr_preset_name(size_t index);

/* Materialized configuration as JSON. Writes at most `cap` bytes
 * including the terminator; *written (optional) receives the full
 * length excluding the terminator. Returns CDMR_ERR_INVALID_ARG when
 * the buffer is too small. */
cdmr_status cdmr_scenario_to_json(const cdmr_scenario* scenario, char* buf,
                                  size_t cap, size_t* written);

size_t cdmr_scenario_robot_count(const cdmr_scenario* scenario);

/* ---- runs ---- */
/* Executes the scenario. verify != 0 turns module invariants into hard
 * per-step assertions. frames_stride > 0 records snapshots for SVG
 * rendering every that many steps. */
cdmr_status cdmr_run_execute(const cdmr_scenario* scenario, int verify,
                             int frames_stride, cdmr_run** out);
void cdmr_run_free(cdmr_run* run);

size_t cdmr_run_step_count(const cdmr_run* run);
/* Settling time (s); NaN when the run never settled. */
double cdmr_run_settling_time(const cdmr_run* run);
/* Completed charging cycles for one robot (0 without batteries). */
cdmr_status cdmr_run_charge_cycles(const cdmr_run* run, size_t robot,
                                   int* out);
/* Discretization budgets and trajectory minima (NaN when not tracked). */
double cdmr_run_min_energy(const cdmr_run* run);
double cdmr_run_min_obstacle_distance(const cdmr_run* run);
double cdmr_run_eps_energy(const cdmr_run* run);
double cdmr_run_eps_obstacle_dist(const cdmr_run* run);

/* Per-step series by name: "t", "J", "kkt_max", "witness_lhs",
 * "witness_rhs", "min_h_energy", "min_h_obstacle",
 * "min_obstacle_clearance" (robot ignored), and per-robot "J_i",
 * "delta_i", "E_i" (robot selects which). Writes min(cap, steps) values
 * and reports the total length in *len. */
cdmr_status cdmr_run_series(const cdmr_run* run, const char* name,
                            size_t robot, double* out, size_t cap,
                            size_t* len);

/* ---- outputs ---- */
cdmr_status cdmr_run_write_csv(const cdmr_run* run, const char* path);
cdmr_status cdmr_run_write_frames(const cdmr_run* run, const char* dir);
cdmr_status cdmr_run_write_energy_chart(const cdmr_run* run, const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CDMR_H */
