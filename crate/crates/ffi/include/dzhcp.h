#ifndef DZHCP_H
#define DZHCP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum DzhcpStatus {
  DZHCP_STATUS_OK = 0,
  DZHCP_STATUS_NULL_POINTER = 1,
  DZHCP_STATUS_INVALID_ARGUMENT = 2,
  DZHCP_STATUS_NON_CONVERGENCE = 3,
  DZHCP_STATUS_RESOURCE_LIMIT = 4,
  DZHCP_STATUS_ACCEPTANCE_TOO_LOW = 5,
  DZHCP_STATUS_PANIC = 6,
} DzhcpStatus;

typedef enum DzhcpProcess {
  DZHCP_PROCESS_TYPE_I = 0,
  DZHCP_PROCESS_TYPE_II = 1,
  DZHCP_PROCESS_MATERN_I = 2,
  DZHCP_PROCESS_MATERN_II = 3,
} DzhcpProcess;

/**
 * Validated parameters plus the quadrature settings used by the integral calls.
 */
typedef struct DzhcpModel DzhcpModel;

/**
 * Model parameters in linear SI units. `r0 <= 0` selects the link distance.
 */
typedef struct DzhcpParams {
  double lambda_p;
  double r_tx;
  double r_cs;
  double d;
  double p_t;
  double path_loss_const;
  double alpha;
  double threshold;
  double r0;
} DzhcpParams;

typedef struct DzhcpInterference {
  double mean_interference;
  double misr;
  double gain;
  double quad_error;
  double tail;
} DzhcpInterference;

typedef struct DzhcpEstimate {
  double mean;
  double std_error;
  double ci_low;
  double ci_high;
  uint64_t n_effective;
  uint64_t seed;
} DzhcpEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *dzhcp_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dzhcp_version(void);

/**
 * # Safety
 * `out` must be null or point to writable memory for one `DzhcpParams`.
 */
enum DzhcpStatus dzhcp_params_default(struct DzhcpParams *out);

/**
 * Validate `params` and allocate a model handle.
 *
 * # Safety
 * `params` must be null or point to a readable `DzhcpParams`; `out` must be
 * null or point to writable storage for one pointer.
 */
enum DzhcpStatus dzhcp_model_new(const struct DzhcpParams *params, struct DzhcpModel **out);

/**
 * # Safety
 * `model` must be null or a handle from `dzhcp_model_new` that has not been freed.
 */
void dzhcp_model_free(struct DzhcpModel *model);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum DzhcpStatus dzhcp_model_params(const struct DzhcpModel *model, struct DzhcpParams *out);

/**
 * Set the relative tolerance and truncation radius of the interference
 * integral. `r_max <= 0` keeps the current radius.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
enum DzhcpStatus dzhcp_model_set_quadrature(struct DzhcpModel *model, double rel_tol, double r_max);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum DzhcpStatus dzhcp_exclusion_area(const struct DzhcpModel *model,
                                      enum DzhcpProcess process,
                                      double *out);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum DzhcpStatus dzhcp_intensity(const struct DzhcpModel *model,
                                 enum DzhcpProcess process,
                                 double *out);

/**
 * Two-pair retention probability at distance `r`, bearing `beta` and
 * orientation `theta` of the second pair.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum DzhcpStatus dzhcp_kernel(const struct DzhcpModel *model,
                              enum DzhcpProcess process,
                              double r,
                              double beta,
                              double theta,
                              double *out);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum DzhcpStatus dzhcp_eta(const struct DzhcpModel *model, double v, double *out);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum DzhcpStatus dzhcp_mean_interference(const struct DzhcpModel *model,
                                         enum DzhcpProcess process,
                                         struct DzhcpInterference *out);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum DzhcpStatus dzhcp_asymptotic_gain(const struct DzhcpModel *model,
                                       enum DzhcpProcess process,
                                       double *out);

/**
 * Success probability approximation at the linear SIR threshold `threshold`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum DzhcpStatus dzhcp_success_prob(const struct DzhcpModel *model,
                                    enum DzhcpProcess process,
                                    double threshold,
                                    double *out);

/**
 * Poisson reference success probability.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum DzhcpStatus dzhcp_success_prob_ppp(double threshold, double alpha, double *out);

/**
 * Monte Carlo intensity over a square observation window of side
 * `window_side` with the minimal guard margin.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum DzhcpStatus dzhcp_estimate_intensity(const struct DzhcpModel *model,
                                          enum DzhcpProcess process,
                                          double window_side,
                                          uint64_t n_reps,
                                          uint64_t seed,
                                          struct DzhcpEstimate *out);

/**
 * Palm Monte Carlo mean interference over a disk observation window of
 * radius `radius`, with `n_reps` accepted replications.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum DzhcpStatus dzhcp_palm_interference(const struct DzhcpModel *model,
                                         enum DzhcpProcess process,
                                         double radius,
                                         uint64_t n_reps,
                                         uint64_t seed,
                                         struct DzhcpEstimate *out);

/**
 * Empirical SIR ccdf at `n_thresholds` linear thresholds; writes one
 * estimate per threshold into `out`.
 *
 * # Safety
 * `model` must be a live handle, `thresholds` readable for `n_thresholds`
 * values and `out` writable for as many estimates.
 */
enum DzhcpStatus dzhcp_estimate_success_prob(const struct DzhcpModel *model,
                                             enum DzhcpProcess process,
                                             const double *thresholds,
                                             size_t n_thresholds,
                                             double radius,
                                             uint64_t n_reps,
                                             uint64_t seed,
                                             struct DzhcpEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DZHCP_H */
