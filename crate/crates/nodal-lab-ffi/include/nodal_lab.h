#ifndef NODAL_LAB_FFI_H
#define NODAL_LAB_FFI_H

/* Generated by cbindgen from nodal-lab-ffi; regenerate with `cargo build`, do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum NodalStatus {
  /**
   * Success.
   */
  NodalStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  NodalStatus_NullPointer = 1,
  /**
   * Invalid configuration or argument (bad measure spec, non-UTF-8
   * string, out-of-range parameter).
   */
  NodalStatus_InvalidArgument = 2,
  /**
   * A numerical routine failed (degenerate covariance, quadrature).
   */
  NodalStatus_NumericalFailure = 3,
  /**
   * An internal panic was caught at the boundary.
   */
  NodalStatus_Panic = 4,
} NodalStatus;

/**
 * Frequency convention selector.
 */
typedef enum NodalConvention {
  /**
   * ω = 1: wavelength 2π.
   */
  NodalConvention_Angular = 0,
  /**
   * ω = 2π: rescaled waves, unit wavelength scale.
   */
  NodalConvention_TwoPi = 1,
} NodalConvention;

/**
 * Opaque Monte Carlo result set.
 */
typedef struct NodalEstimates NodalEstimates;

/**
 * Opaque experiment description (measure, direction, length, sample count).
 */
typedef struct NodalExperiment NodalExperiment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buffer` (NUL-terminated,
 * truncated to `capacity`).  Returns the full message length in bytes
 * excluding the NUL, or 0 when no error is pending.  `buffer` may be null
 * to query the required capacity.
 */
size_t nodal_last_error_message(char *buffer, size_t capacity);

/**
 * Create an experiment handle.
 *
 * `measure` is a builtin spec (`cilleruelo`, `tilted`, `uniform:<n>`,
 * `sigma:<theta>:<n>`, `lattice:<m>`) or a path to a measure JSON file;
 * `u` is the segment direction in radians, `length` the segment length.
 *
 * # Safety
 * `measure` must be NUL-terminated; `out` must be a valid pointer.
 */
enum NodalStatus nodal_experiment_new(const char *measure,
                                      enum NodalConvention convention,
                                      double u,
                                      double length,
                                      uint64_t samples,
                                      uint64_t seed,
                                      struct NodalExperiment **out);

/**
 * Release an experiment handle (null is a no-op).
 *
 * # Safety
 * `handle` must come from [`nodal_experiment_new`] and not be freed twice.
 */
void nodal_experiment_free(struct NodalExperiment *handle);

/**
 * Run the Monte Carlo experiment and hand back an estimates handle.
 *
 * # Safety
 * `handle` must be a live experiment; `out` must be valid.
 */
enum NodalStatus nodal_experiment_run(const struct NodalExperiment *handle,
                                      struct NodalEstimates **out);

/**
 * Release an estimates handle (null is a no-op).
 *
 * # Safety
 * `handle` must come from [`nodal_experiment_run`] and not be freed twice.
 */
void nodal_estimates_free(struct NodalEstimates *handle);

/**
 * Mean zero count with its standard error.
 *
 * # Safety
 * All pointers must be valid.
 */
enum NodalStatus nodal_estimates_mean(const struct NodalEstimates *handle,
                                      double *value,
                                      double *se);

/**
 * Second factorial moment E[Z(Z−1)] with its standard error.
 *
 * # Safety
 * All pointers must be valid.
 */
enum NodalStatus nodal_estimates_second_factorial(const struct NodalEstimates *handle,
                                                  double *value,
                                                  double *se);

/**
 * Sample variance of the zero count with its standard error.
 *
 * # Safety
 * All pointers must be valid.
 */
enum NodalStatus nodal_estimates_variance(const struct NodalEstimates *handle,
                                          double *value,
                                          double *se);

/**
 * Persistence probability P(Z = 0) with its standard error.
 *
 * # Safety
 * All pointers must be valid.
 */
enum NodalStatus nodal_estimates_persistence(const struct NodalEstimates *handle,
                                             double *value,
                                             double *se);

/**
 * Empirical probability of observing exactly `count` zeros.
 *
 * # Safety
 * All pointers must be valid.
 */
enum NodalStatus nodal_estimates_count_probability(const struct NodalEstimates *handle,
                                                   uint64_t count,
                                                   double *probability);

/**
 * Kac–Rice expected zero count for a measure/direction/length, no sampling.
 *
 * # Safety
 * `measure` must be NUL-terminated; `out` must be valid.
 */
enum NodalStatus nodal_expected_zero_count(const char *measure,
                                           enum NodalConvention convention,
                                           double u,
                                           double length,
                                           double *out);

/**
 * Lattice points on the circle of radius √m: count and fourth moment ν̂₄.
 *
 * # Safety
 * `r2` and `nu4_hat` must be valid pointers.
 */
enum NodalStatus nodal_lattice_circle(uint64_t m, uint64_t *r2, double *nu4_hat);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NODAL_LAB_FFI_H */
