#ifndef NORMPART_H
#define NORMPART_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define NP_OK 0

/**
 * A required pointer argument was null.
 */
#define NP_ERR_NULL 1

/**
 * Malformed input: bad descriptor, wrong length, invalid parameter.
 */
#define NP_ERR_INPUT 2

/**
 * The space lacks a capability the operation needs.
 */
#define NP_ERR_UNSUPPORTED 3

/**
 * Mathematically undefined request, such as a gradient at the origin.
 */
#define NP_ERR_DOMAIN 4

/**
 * Sampler diagnostics, internal failures and caught panics.
 */
#define NP_ERR_INTERNAL 5

/**
 * Opaque handle to a normed space.
 */
typedef struct NpSpace NpSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread; empty after a success. Valid until the next
 * call on the same thread.
 */
const char *np_last_error(void);

/**
 * Parse a JSON descriptor into a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
int32_t np_space_new(const char *json, struct NpSpace **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `s` must come from `np_space_new` and not be used afterwards.
 */
void np_space_free(struct NpSpace *s);

/**
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
int32_t np_space_dim(const struct NpSpace *s, size_t *out);

/**
 * ‖x‖_X.
 *
 * # Safety
 * `x` must point to `len` doubles.
 */
int32_t np_norm(const struct NpSpace *s, const double *x, size_t len, double *out);

/**
 * Gradient of the norm at x into `grad` (length `len`). `nonsmooth` receives 1 when x is a
 * non-smooth point and the result is a subgradient.
 *
 * # Safety
 * `x` and `grad` must point to `len` doubles.
 */
int32_t np_gradient(const struct NpSpace *s,
                    const double *x,
                    size_t len,
                    double *grad,
                    int32_t *nonsmooth);

/**
 * Exact volume of the unit ball.
 *
 * # Safety
 * `out` must be writable.
 */
int32_t np_volume_exact(const struct NpSpace *s, double *out);

/**
 * Hit-or-miss volume estimate.
 *
 * # Safety
 * `value` must be writable; `stderr_out` may be null.
 */
int32_t np_volume_mc(const struct NpSpace *s,
                     uint64_t trials,
                     uint64_t seed,
                     double *value,
                     double *stderr_out);

/**
 * ψ(w) = ‖w‖_{Π*X}/vol(B_X).
 *
 * # Safety
 * `w` must point to `len` doubles; `value` writable; `stderr_out` may be null.
 */
int32_t np_psi(const struct NpSpace *s,
               const double *w,
               size_t len,
               uint64_t samples,
               uint64_t seed,
               double *value,
               double *stderr_out);

/**
 * ((1−ρ)/(1+ρ))ⁿ.
 *
 * # Safety
 * `out` must be writable.
 */
int32_t np_padding_prob_exact(const struct NpSpace *s, double rho, double *out);

/**
 * Monte Carlo probability that a diameter-`delta` partition separates u and v.
 *
 * # Safety
 * `u` and `v` must point to `len` doubles; `value` writable; `stderr_out` may be null.
 */
int32_t np_separation_prob_mc(const struct NpSpace *s,
                              const double *u,
                              const double *v,
                              size_t len,
                              double delta,
                              uint64_t trials,
                              uint64_t seed,
                              double *value,
                              double *stderr_out);

/**
 * n = n_1⋯n_k + remainder. Writes up to `cap` factors; `count` always receives k, and the call
 * fails with `NP_ERR_INPUT` if k > cap.
 *
 * # Safety
 * `factors` must have room for `cap` values; `count` and `remainder` must be writable.
 */
int32_t np_loglacunary_decompose(uint64_t n,
                                 uint64_t *factors,
                                 size_t cap,
                                 size_t *count,
                                 uint64_t *remainder);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NORMPART_H */
