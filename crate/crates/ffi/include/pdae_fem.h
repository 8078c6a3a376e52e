#ifndef PDAE_FEM_H
#define PDAE_FEM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum PdaeStatus {
  PdaeStatus_Ok = 0,
  /**
   * Internal failure (solver, io); see pdae_last_error_message.
   */
  PdaeStatus_Runtime = 1,
  /**
   * Malformed or inconsistent configuration.
   */
  PdaeStatus_Config = 2,
  /**
   * A required pointer argument was null.
   */
  PdaeStatus_NullArgument = 3,
  /**
   * Output buffer too small for the requested data.
   */
  PdaeStatus_BufferTooSmall = 4,
} PdaeStatus;

/**
 * Opaque: a validated run configuration.
 */
typedef struct PdaeConfig PdaeConfig;

/**
 * Opaque: a computed trajectory together with its state dimension.
 */
typedef struct PdaeTrajectory PdaeTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message for this thread into `buf` (NUL-terminated,
 * truncated to `len` bytes). Returns the full message length in bytes.
 */
uintptr_t pdae_last_error_message(char *buf, uintptr_t len);

/**
 * Load and validate a configuration file (TOML, or JSON by extension).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum PdaeStatus pdae_config_load(const char *path, struct PdaeConfig **out);

/**
 * Parse and validate a configuration from a TOML string.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum PdaeStatus pdae_config_parse_toml(const char *text, struct PdaeConfig **out);

/**
 * Release a configuration handle. A null pointer is a no-op.
 *
 * # Safety
 * `cfg` must come from a `pdae_config_*` constructor and not be freed twice.
 */
void pdae_config_free(struct PdaeConfig *cfg);

/**
 * Run the configured solve in memory (no files are written).
 *
 * # Safety
 * `cfg` must be a live configuration handle; `out` must be valid.
 */
enum PdaeStatus pdae_solve(const struct PdaeConfig *cfg, struct PdaeTrajectory **out);

/**
 * Number of grid points in the trajectory (steps + 1), or 0 on null.
 *
 * # Safety
 * `traj` must be a live trajectory handle or null.
 */
uintptr_t pdae_trajectory_len(const struct PdaeTrajectory *traj);

/**
 * State dimension (bulk plus boundary unknowns), or 0 on null.
 *
 * # Safety
 * `traj` must be a live trajectory handle or null.
 */
uintptr_t pdae_trajectory_state_dim(const struct PdaeTrajectory *traj);

/**
 * Time of grid point `i`.
 *
 * # Safety
 * `traj` must be a live trajectory handle; `out` must be valid.
 */
enum PdaeStatus pdae_trajectory_time(const struct PdaeTrajectory *traj, uintptr_t i, double *out);

/**
 * Discrete energy 0.5 x^T E x at grid point `i`.
 *
 * # Safety
 * `traj` must be a live trajectory handle; `out` must be valid.
 */
enum PdaeStatus pdae_trajectory_energy(const struct PdaeTrajectory *traj, uintptr_t i, double *out);

/**
 * Constraint residual at grid point `i`.
 *
 * # Safety
 * `traj` must be a live trajectory handle; `out` must be valid.
 */
enum PdaeStatus pdae_trajectory_constraint_residual(const struct PdaeTrajectory *traj,
                                                    uintptr_t i,
                                                    double *out);

/**
 * Copy the state vector at grid point `i` into `buf` (capacity `len`).
 *
 * # Safety
 * `traj` must be a live trajectory handle; `buf` must point to at least
 * `len` doubles.
 */
enum PdaeStatus pdae_trajectory_state(const struct PdaeTrajectory *traj,
                                      uintptr_t i,
                                      double *buf,
                                      uintptr_t len);

/**
 * Release a trajectory handle. A null pointer is a no-op.
 *
 * # Safety
 * `traj` must come from `pdae_solve` and not be freed twice.
 */
void pdae_trajectory_free(struct PdaeTrajectory *traj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PDAE_FEM_H */
