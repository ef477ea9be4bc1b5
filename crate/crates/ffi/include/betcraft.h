#ifndef BETCRAFT_H
#define BETCRAFT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum BetcraftStatus {
  BETCRAFT_STATUS_OK = 0,
  BETCRAFT_STATUS_NULL_POINTER = 1,
  BETCRAFT_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The observation does not fit the test (wrong shape or domain).
   */
  BETCRAFT_STATUS_WRONG_OBSERVATION = 3,
  /**
   * A numerical failure inside the test.
   */
  BETCRAFT_STATUS_NUMERICAL = 4,
  /**
   * An internal panic was caught.
   */
  BETCRAFT_STATUS_INTERNAL = 5,
} BetcraftStatus;

/**
 * Opaque handle to a running sequential test.
 */
typedef struct BetcraftTest BetcraftTest;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code. Never null; never freed.
 */
const char *betcraft_status_message(enum BetcraftStatus status);

/**
 * Message of the most recent failure on this thread, or an empty string.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *betcraft_last_error(void);

/**
 * Create a test from a JSON spec such as `{"test":"mmd","bandwidth":1.0}`.
 *
 * # Safety
 * `spec_json` must be a NUL-terminated string and `out` a writable pointer.
 * On success `*out` owns a handle to release with [`betcraft_test_free`].
 */
enum BetcraftStatus betcraft_test_new(const char *spec_json,
                                      double alpha,
                                      struct BetcraftTest **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `test` must come from [`betcraft_test_new`] and not be used afterwards.
 */
void betcraft_test_free(struct BetcraftTest *test);

/**
 * Feed one scalar observation. `rejected` (may be null) receives whether
 * the null has been rejected by now.
 *
 * # Safety
 * `test` must be a live handle; `rejected` null or writable.
 */
enum BetcraftStatus betcraft_test_observe_scalar(struct BetcraftTest *test,
                                                 double value,
                                                 bool *rejected);

/**
 * Feed one `(x, y)` pair of scalars.
 *
 * # Safety
 * As for [`betcraft_test_observe_scalar`].
 */
enum BetcraftStatus betcraft_test_observe_pair(struct BetcraftTest *test,
                                               double x,
                                               double y,
                                               bool *rejected);

/**
 * Feed one pair of `dim`-dimensional points.
 *
 * # Safety
 * `x` and `y` must each point to `dim` readable doubles; otherwise as for
 * [`betcraft_test_observe_scalar`].
 */
enum BetcraftStatus betcraft_test_observe_vectors(struct BetcraftTest *test,
                                                  const double *x,
                                                  const double *y,
                                                  size_t dim,
                                                  bool *rejected);

/**
 * Current wealth (betting tests) or monitored statistic (baselines).
 *
 * # Safety
 * `test` must be a live handle and `out` writable.
 */
enum BetcraftStatus betcraft_test_statistic(const struct BetcraftTest *test, double *out);

/**
 * Number of observations consumed.
 *
 * # Safety
 * `test` must be a live handle and `out` writable.
 */
enum BetcraftStatus betcraft_test_steps(const struct BetcraftTest *test, uint64_t *out);

/**
 * Step at which the null was rejected, or 0 if it has not been.
 *
 * # Safety
 * `test` must be a live handle and `out` writable.
 */
enum BetcraftStatus betcraft_test_stopping_time(const struct BetcraftTest *test, uint64_t *out);

/**
 * Upper-`alpha` quantile of the Kolmogorov distribution.
 *
 * # Safety
 * `out` must be writable.
 */
enum BetcraftStatus betcraft_kolmogorov_quantile(double alpha, double *out);

/**
 * Upper-`alpha` quantile of χ² with `df` degrees of freedom.
 *
 * # Safety
 * `out` must be writable.
 */
enum BetcraftStatus betcraft_chi2_quantile(uint32_t df, double alpha, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BETCRAFT_H */
