#ifndef HCS_H
#define HCS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HcsStatus {
  HCS_STATUS_OK = 0,
  HCS_STATUS_NULL_POINTER = 1,
  HCS_STATUS_INVALID_ARGUMENT = 2,
  HCS_STATUS_INADMISSIBLE = 3,
  HCS_STATUS_SINGULAR = 4,
  HCS_STATUS_NOT_CONVERGED = 5,
  HCS_STATUS_NUMERICAL_FAILURE = 6,
  HCS_STATUS_PANIC = 7,
} HcsStatus;

/**
 * A normalized coherent state.
 */
typedef struct HcsState HcsState;

typedef struct HcsComplex {
  double re;
  double im;
} HcsComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates the state with parameter `u = u_re + i u_im`.
 *
 * # Safety
 * `u_re` and `u_im` must point to three doubles; `out_state` must be writable.
 */
enum HcsStatus hcs_state_new(const double *u_re, const double *u_im, struct HcsState **out_state);

/**
 * Releases a state. Null is ignored.
 *
 * # Safety
 * `state` must come from this library and not be used afterwards.
 */
void hcs_state_free(struct HcsState *state);

/**
 * `ψ_u(x, y, z)`.
 *
 * # Safety
 * `state` must be a live handle; `out_*` must be writable.
 */
enum HcsStatus hcs_state_amplitude(const struct HcsState *state,
                                   double x,
                                   double y,
                                   double z,
                                   struct HcsComplex *out_value);

/**
 * The four-vector `w = Im l`.
 *
 * # Safety
 * `state` must be a live handle; `out_*` must point to four writable doubles.
 */
enum HcsStatus hcs_state_w(const struct HcsState *state, double *out_w);

/**
 * `w·w`.
 *
 * # Safety
 * `state` must be a live handle; `out_*` must be writable.
 */
enum HcsStatus hcs_state_ww(const struct HcsState *state, double *out_ww);

/**
 * `⟨x⟩`.
 *
 * # Safety
 * `state` must be a live handle; `out_*` must point to three writable doubles.
 */
enum HcsStatus hcs_state_expect_position(const struct HcsState *state, double *out_x);

/**
 * `⟨r⟩` as `2w⁰/(w·w)`.
 *
 * # Safety
 * `state` must be a live handle; `out_*` must be writable.
 */
enum HcsStatus hcs_state_expect_r(const struct HcsState *state, double *out_r);

/**
 * New state evolved by fictitious time `eps`; the input is unchanged.
 *
 * # Safety
 * `state` must be a live handle; `out_state` must be writable.
 */
enum HcsStatus hcs_state_evolve(const struct HcsState *state,
                                double eps,
                                struct HcsState **out_state);

/**
 * `⟨a|b⟩`.
 *
 * # Safety
 * `a` and `b` must be live handles; `out_*` must be writable.
 */
enum HcsStatus hcs_overlap(const struct HcsState *a,
                           const struct HcsState *b,
                           struct HcsComplex *out_value);

/**
 * `L_n^α(x)`.
 *
 * # Safety
 * `out_*` must be writable.
 */
enum HcsStatus hcs_laguerre(uint32_t n, uint32_t alpha, double x, double *out_value);

/**
 * `⟨x|n₁ n₂ m⟩`.
 *
 * # Safety
 * `out_*` must be writable.
 */
enum HcsStatus hcs_eigenstate(uint32_t n1,
                              uint32_t n2,
                              int32_t m,
                              double x,
                              double y,
                              double z,
                              struct HcsComplex *out_value);

/**
 * Largest commutation-relation residual over all generator pairs at the
 * given Fock cutoff.
 *
 * # Safety
 * `out_*` must be writable.
 */
enum HcsStatus hcs_commutator_max_residual(uint32_t cutoff, double *out_value);

/**
 * Static description of a status code.
 */
const char *hcs_status_message(enum HcsStatus status);

/**
 * Message for the last call on this thread; empty after a success. Valid
 * until the next call into this library from the same thread.
 */
const char *hcs_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HCS_H */
