#ifndef TELEPORT_WITNESS_H
#define TELEPORT_WITNESS_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TwFefMethod {
  TW_FEF_METHOD_NONE = 0,
  TW_FEF_METHOD_EXACT2X2 = 1,
  TW_FEF_METHOD_UNITARY_ASCENT = 2,
  TW_FEF_METHOD_SAMPLING = 3,
} TwFefMethod;

typedef enum TwStatus {
  TW_STATUS_OK = 0,
  TW_STATUS_NULL_POINTER = 1,
  TW_STATUS_INVALID_ARGUMENT = 2,
  TW_STATUS_INVALID_STATE = 3,
  TW_STATUS_BUFFER_TOO_SMALL = 4,
  TW_STATUS_PANIC = 5,
} TwStatus;

typedef enum TwVerdict {
  TW_VERDICT_NOT_DETECTED = 0,
  TW_VERDICT_USEFUL_DETECTED = 1,
} TwVerdict;

/**
 * Opaque validated bipartite state.
 */
typedef struct TwState TwState;

/**
 * Result of [`tw_classify`].
 */
typedef struct TwReport {
  size_t d;
  double expectation;
  enum TwVerdict verdict;
  /**
   * `TW_FEF_METHOD_NONE` when no FEF was requested.
   */
  enum TwFefMethod fef_method;
  double fef_value;
  bool fef_converged;
} TwReport;

/**
 * Result of the FEF entry points.
 */
typedef struct TwFef {
  double value;
  enum TwFefMethod method;
  size_t restarts_used;
  size_t iterations;
  bool converged;
} TwFef;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message on this thread, or null. Valid until the next failing call.
 */
const char *tw_last_error(void);

/**
 * Validates a `d^2 x d^2` matrix given as row-major real and imaginary parts
 * of length `len = d^4`.
 *
 * # Safety
 * `re` and `im` must point to `len` readable doubles; `out` must be writable.
 */
enum TwStatus tw_state_from_matrix(size_t d,
                                   const double *re,
                                   const double *im,
                                   size_t len,
                                   struct TwState **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum TwStatus tw_state_isotropic(size_t d, double beta, struct TwState **out);

/**
 * Generalized Werner state with `d` real Schmidt amplitudes.
 *
 * # Safety
 * `alphas` must point to `d` readable doubles; `out` must be writable.
 */
enum TwStatus tw_state_werner(size_t d, double v, const double *alphas, struct TwState **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum TwStatus tw_state_mems(double concurrence, struct TwState **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum TwStatus tw_state_discord(double a, struct TwState **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum TwStatus tw_state_random(size_t d, size_t rank, uint64_t seed, struct TwState **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `state` must be null or a handle not yet freed.
 */
void tw_state_free(struct TwState *state);

/**
 * Local dimension of a state, or 0 for null.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t tw_state_dim(const struct TwState *state);

/**
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum TwStatus tw_witness_expectation(const struct TwState *state, double *out);

/**
 * Witness expectation, verdict and optionally the FEF (exact at `d = 2`,
 * optimizer with `restarts` and `seed` otherwise).
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum TwStatus tw_classify(const struct TwState *state,
                          bool with_fef,
                          size_t restarts,
                          uint64_t seed,
                          struct TwReport *out);

/**
 * Exact FEF of a two-qubit state.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum TwStatus tw_fef_exact_2x2(const struct TwState *state, struct TwFef *out);

/**
 * Optimizer lower bound on the FEF with default settings except `restarts` and `seed`.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum TwStatus tw_fef_optimize(const struct TwState *state,
                              size_t restarts,
                              uint64_t seed,
                              struct TwFef *out);

/**
 * Writes `W` for local dimension `d` as row-major parts into buffers of
 * length `len >= d^4`.
 *
 * # Safety
 * `re` and `im` must point to `len` writable doubles.
 */
enum TwStatus tw_witness_operator(size_t d, double *re, double *im, size_t len);

/**
 * # Safety
 * `out` must be writable.
 */
enum TwStatus tw_isotropic_expectation(size_t d, double beta, double *out);

/**
 * # Safety
 * `alphas` must point to `d` readable doubles; `out` must be writable.
 */
enum TwStatus tw_werner_expectation(size_t d, double v, const double *alphas, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum TwStatus tw_mems_expectation(double concurrence, double *out);

/**
 * Lipschitz constant of the FEF under the Frobenius norm, `d^2`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TwStatus tw_continuity_bound(size_t d, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TELEPORT_WITNESS_H */
