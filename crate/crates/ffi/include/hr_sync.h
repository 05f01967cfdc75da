#ifndef HR_SYNC_H
#define HR_SYNC_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Time-stepping scheme selector.
 */
typedef enum HrScheme {
  HR_SCHEME_IMEX_EULER = 0,
  HR_SCHEME_IMEX_STRANG = 1,
} HrScheme;

/**
 * Status codes returned by every fallible call.
 */
typedef enum HrStatus {
  HR_STATUS_OK = 0,
  HR_STATUS_NULL_POINTER = 1,
  HR_STATUS_INVALID_ARGUMENT = 2,
  HR_STATUS_INVALID_CONFIG = 3,
  HR_STATUS_BELOW_THRESHOLD = 4,
  HR_STATUS_NON_FINITE = 5,
  HR_STATUS_SOLVER_FAILURE = 6,
  HR_STATUS_BUFFER_TOO_SMALL = 7,
  HR_STATUS_PANIC = 8,
} HrStatus;

/**
 * Opaque simulation handle.
 */
typedef struct HrSimulation HrSimulation;

typedef struct HrParameters {
  double a;
  double b;
  double alpha;
  double beta;
  double q;
  double r;
  double c;
  double j;
  double d;
  double p;
} HrParameters;

typedef struct HrConstants {
  double c1;
  double c2;
  double r1;
  double m;
  double k;
  double c3;
  double lambda;
  /**
   * NaN when undefined.
   */
  double p_star;
  /**
   * NaN unless p exceeds p_star.
   */
  double delta;
  /**
   * NaN unless p exceeds p_star.
   */
  double mu;
} HrConstants;

typedef struct HrRecord {
  double t;
  double norm_g_sq;
  double sync_l;
  double sync_dist_sq;
  double h1_u;
  double weighted_norm;
} HrRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parameters of the built-in test set (λ = 8, p* = 5) with coupling `p`.
 */
struct HrParameters hr_parameters_test_set(double p);

/**
 * Writes p* for `params` to `out`.
 *
 * # Safety
 * `params` and `out` must be valid pointers or null.
 */
enum HrStatus hr_sync_threshold(const struct HrParameters *params, double *out);

/**
 * Writes the derived constants for `params` on a domain of area `omega_area`.
 *
 * # Safety
 * `params` and `out` must be valid pointers or null.
 */
enum HrStatus hr_constants(const struct HrParameters *params,
                           double omega_area,
                           struct HrConstants *out);

/**
 * Creates a simulation with zero initial state.
 *
 * # Safety
 * `params` must be valid; `out` must point to writable storage for a handle.
 */
enum HrStatus hr_simulation_new(const struct HrParameters *params,
                                size_t dimension,
                                size_t points,
                                double length,
                                double dt,
                                enum HrScheme scheme,
                                struct HrSimulation **out);

/**
 * Creates a simulation from config-file text, with its configured initial data.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must point to writable storage.
 */
enum HrStatus hr_simulation_from_config(const char *text, struct HrSimulation **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `sim` must come from this library and must not be used afterwards.
 */
void hr_simulation_free(struct HrSimulation *sim);

/**
 * Number of grid nodes.
 *
 * # Safety
 * `sim` must be a valid handle or null (returns 0).
 */
size_t hr_simulation_len(const struct HrSimulation *sim);

/**
 * Current simulation time.
 *
 * # Safety
 * `sim` must be a valid handle or null (returns NaN).
 */
double hr_simulation_time(const struct HrSimulation *sim);

/**
 * Replaces the state with `6 * len` doubles and resets time to zero.
 *
 * # Safety
 * `data` must point to `count` readable doubles.
 */
enum HrStatus hr_simulation_set_state(struct HrSimulation *sim, const double *data, size_t count);

/**
 * Replaces the state with seeded fourier-smooth data and resets time to zero.
 *
 * # Safety
 * `sim` must be a valid handle or null.
 */
enum HrStatus hr_simulation_init_fourier(struct HrSimulation *sim, uint64_t seed, double amplitude);

/**
 * Advances by `steps` time steps. On failure the state is left unchanged.
 *
 * # Safety
 * `sim` must be a valid handle or null.
 */
enum HrStatus hr_simulation_advance(struct HrSimulation *sim, uint64_t steps);

/**
 * Diagnostics of the current state.
 *
 * # Safety
 * `sim` and `out` must be valid pointers or null.
 */
enum HrStatus hr_simulation_diagnostics(const struct HrSimulation *sim, struct HrRecord *out);

/**
 * Derived constants of the simulation's parameters and domain.
 *
 * # Safety
 * `sim` and `out` must be valid pointers or null.
 */
enum HrStatus hr_simulation_constants(const struct HrSimulation *sim, struct HrConstants *out);

/**
 * Copies the state into `out` (`6 * len` doubles, field-major).
 *
 * # Safety
 * `out` must point to `capacity` writable doubles.
 */
enum HrStatus hr_simulation_state(const struct HrSimulation *sim, double *out, size_t capacity);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to fit) and returns the full message length in bytes.
 *
 * # Safety
 * `buf` must point to `capacity` writable bytes, or be null to query the length.
 */
size_t hr_last_error_message(char *buf, size_t capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HR_SYNC_H */
