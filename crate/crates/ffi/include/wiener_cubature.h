#ifndef WIENER_CUBATURE_H
#define WIENER_CUBATURE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Solver selector for [`wc_solve`].
 */
typedef enum {
  WC_METHOD_TAYLOR = 0,
  WC_METHOD_LOG_ODE = 1,
} WcMethod;

/**
 * Result codes shared by all functions.
 */
typedef enum {
  WC_STATUS_OK = 0,
  WC_STATUS_NULL_POINTER = 1,
  WC_STATUS_INVALID_ARGUMENT = 2,
  WC_STATUS_UNSUPPORTED = 3,
  WC_STATUS_IO = 4,
  WC_STATUS_PARSE = 5,
  WC_STATUS_VERIFICATION_FAILED = 6,
  WC_STATUS_BUDGET_EXCEEDED = 7,
  WC_STATUS_NUMERICAL = 8,
  WC_STATUS_PANIC = 9,
} WcStatus;

/**
 * Opaque cubature formula.
 */
typedef struct WcFormula WcFormula;

/**
 * Opaque SDE problem.
 */
typedef struct WcProblem WcProblem;

/**
 * Flat copy of a solver report. `reference` and `abs_error` are NaN when
 * no reference is known; `std_error` is NaN for cubature runs.
 */
typedef struct {
  double estimate;
  double reference;
  double abs_error;
  double std_error;
  double weight_sum;
  /**
   * Saturates at `u64::MAX`.
   */
  uint64_t leaf_count;
  uint64_t step_count;
} WcReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *wc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wc_version(void);

/**
 * Builds the degree 3, 5 or 7 formula in `dim` Brownian dimensions. `x` is
 * the free parameter of the degree-5 construction (use 0.5).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
WcStatus wc_formula_construct(uint32_t degree, uint32_t dim, double x, WcFormula **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
WcStatus wc_formula_load(const char *path, WcFormula **out);

/**
 * # Safety
 * `f` must be a live handle and `path` a NUL-terminated string.
 */
WcStatus wc_formula_save(const WcFormula *f, const char *path);

/**
 * Number of entries, degree and Brownian dimension of a formula. Any of the
 * output pointers may be null.
 *
 * # Safety
 * `f` must be a live handle; non-null outputs must be writable.
 */
WcStatus wc_formula_info(const WcFormula *f, size_t *len, uint32_t *degree, uint32_t *dim);

/**
 * Largest residual against the expected signature at time `t`, over all
 * words up to the formula's degree. Returns `VerificationFailed` when it
 * exceeds `tol`; the residual is written in both cases.
 *
 * # Safety
 * `f` must be a live handle; `max_residual` must be null or writable.
 */
WcStatus wc_formula_verify(const WcFormula *f, double t, double tol, double *max_residual);

/**
 * # Safety
 * `f` must be null or a handle not yet freed.
 */
void wc_formula_free(WcFormula *f);

/**
 * Expected-signature coefficient `E[S(B)_{0,t}]` of a word over letters
 * `0..=d`, where 0 is time.
 *
 * # Safety
 * `letters` must point to `len` bytes (or be null when `len` is 0); `out`
 * must be writable.
 */
WcStatus wc_expected_signature_coefficient(const uint8_t *letters,
                                           size_t len,
                                           double t,
                                           double *out);

/**
 * Stratonovich GBM `dX = a X dt + Σ b_j X ∘ dB^j` with the identity payoff.
 *
 * # Safety
 * `b` must point to `d` doubles and `out` must be writable.
 */
WcStatus wc_problem_gbm(double a, const double *b, size_t d, double x0, double t, WcProblem **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
WcStatus wc_problem_load(const char *path, WcProblem **out);

/**
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void wc_problem_free(WcProblem *p);

/**
 * Cubature tree over `steps` uniform steps. `threads` 0 means the default
 * pool; results do not depend on it.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
WcStatus wc_solve(const WcProblem *p,
                  const WcFormula *f,
                  WcMethod method,
                  size_t steps,
                  size_t threads,
                  WcReport *out);

/**
 * Heun Monte Carlo with `paths` paths of `steps` steps from `seed`.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
WcStatus wc_monte_carlo(const WcProblem *p,
                        size_t paths,
                        size_t steps,
                        uint64_t seed,
                        WcReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WIENER_CUBATURE_H */
