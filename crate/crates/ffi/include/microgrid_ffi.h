#ifndef MICROGRID_FFI_H
#define MICROGRID_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Length of every hourly trace.
 */
#define MG_HOURS_PER_YEAR 8760

typedef enum MgStatus {
  MG_STATUS_OK = 0,
  MG_STATUS_NULL_POINTER = 1,
  MG_STATUS_INVALID_ARGUMENT = 2,
  MG_STATUS_IO = 3,
  MG_STATUS_CONFIG = 4,
  /**
   * Buffer too small.
   */
  MG_STATUS_BUFFER_TOO_SMALL = 5,
  MG_STATUS_RUNTIME = 6,
  MG_STATUS_PANIC = 7,
} MgStatus;

/**
 * Hourly trace selector for [`mg_result_trace`].
 */
typedef enum MgTrace {
  MG_TRACE_DEMAND_KW = 0,
  MG_TRACE_TIDAL_KW = 1,
  MG_TRACE_SOLAR_KW = 2,
  MG_TRACE_DEFICIT_KW = 3,
  MG_TRACE_P_LIB_KW = 4,
  MG_TRACE_P_VRFB_KW = 5,
  MG_TRACE_SOC_LIB_KWH = 6,
  MG_TRACE_SOC_VRFB_KWH = 7,
  MG_TRACE_CURTAILMENT_KW = 8,
  MG_TRACE_BACKUP_KW = 9,
} MgTrace;

/**
 * Opaque result of [`mg_run_year`].
 */
typedef struct MgResult MgResult;

/**
 * Opaque scenario with its search bounds and swarm settings.
 */
typedef struct MgScenario MgScenario;

typedef struct MgDesign {
  double p_tidal_kw;
  double p_solar_kw;
  double span_h;
} MgDesign;

typedef struct MgSummary {
  /**
   * $/MWh.
   */
  double total_lcoe;
  double lib_rated_power_kw;
  double lib_capacity_kwh;
  double lib_realized_lifetime_y;
  double vrfb_rated_power_kw;
  double vrfb_capacity_kwh;
  double vrfb_realized_lifetime_y;
  double backup_energy_kwh;
} MgSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Baseline scenario with synthetic profiles seeded from `seed`.
 *
 * # Safety
 * `out` must be null or valid for a pointer write.
 */
enum MgStatus mg_scenario_baseline(uint64_t seed, struct MgScenario **out);

/**
 * Scenario from a TOML file (UTF-8 path).
 *
 * # Safety
 * `path` must be null or a NUL-terminated string; `out` null or writable.
 */
enum MgStatus mg_scenario_from_toml(const char *path, uint64_t seed, struct MgScenario **out);

/**
 * # Safety
 * `scenario` must be null or a handle from this API not yet freed.
 */
void mg_scenario_free(struct MgScenario *scenario);

/**
 * LCOE of `design` in $/MWh.
 *
 * # Safety
 * `scenario` must be a live handle or null; `out_lcoe` null or writable.
 */
enum MgStatus mg_objective(const struct MgScenario *scenario,
                           struct MgDesign design,
                           double *out_lcoe);

/**
 * Simulates a year; free the result with [`mg_result_free`].
 *
 * # Safety
 * `scenario` must be a live handle or null; `out` null or writable.
 */
enum MgStatus mg_run_year(const struct MgScenario *scenario,
                          struct MgDesign design,
                          struct MgResult **out);

/**
 * # Safety
 * `result` must be a live handle or null; `out` null or writable.
 */
enum MgStatus mg_result_summary(const struct MgResult *result, struct MgSummary *out);

/**
 * Copies one hourly trace into `buf`, which must hold at least
 * [`MG_HOURS_PER_YEAR`] values.
 *
 * # Safety
 * `result` must be a live handle or null; `buf` null or valid for `len`
 * writes.
 */
enum MgStatus mg_result_trace(const struct MgResult *result,
                              enum MgTrace trace,
                              double *buf,
                              size_t len);

/**
 * # Safety
 * `result` must be null or a handle from this API not yet freed.
 */
void mg_result_free(struct MgResult *result);

/**
 * Particle swarm plus local refinement. `swarm_size` 0 keeps the scenario's
 * setting; `restarts` runs use seeds `seed, seed + 1, ...` and the best is
 * kept.
 *
 * # Safety
 * `scenario` must be a live handle or null; outputs null or writable.
 */
enum MgStatus mg_optimize(const struct MgScenario *scenario,
                          uint64_t seed,
                          size_t swarm_size,
                          size_t restarts,
                          struct MgDesign *out_design,
                          double *out_lcoe);

/**
 * Copies the calling thread's last error message into `buf` (truncated,
 * always NUL-terminated when `len > 0`). Returns the full message length
 * including the terminator, or 0 if there is no error.
 *
 * # Safety
 * `buf` must be null or valid for `len` writes.
 */
size_t mg_last_error_message(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MICROGRID_FFI_H */
