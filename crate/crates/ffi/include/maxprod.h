#ifndef MAXPROD_H
#define MAXPROD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MaxprodStatus {
  MAXPROD_STATUS_OK = 0,
  MAXPROD_STATUS_NULL_POINTER = 1,
  MAXPROD_STATUS_INVALID_UTF8 = 2,
  MAXPROD_STATUS_DOMAIN = 3,
  MAXPROD_STATUS_PRECONDITION = 4,
  MAXPROD_STATUS_UNKNOWN_FUNCTION = 5,
  MAXPROD_STATUS_NOT_CERTIFIED = 6,
  MAXPROD_STATUS_HYPOTHESIS = 7,
  MAXPROD_STATUS_NO_CERTIFICATE = 8,
  MAXPROD_STATUS_UNBOUNDED = 9,
  MAXPROD_STATUS_NOT_WEIGHTED = 10,
  MAXPROD_STATUS_DEGENERATE = 11,
  MAXPROD_STATUS_PANIC = 12,
} MaxprodStatus;

/**
 * Opaque function handle. Free with [`maxprod_func_free`].
 */
typedef struct MaxprodFunc MaxprodFunc;

typedef struct MaxprodEval {
  double value;
  /**
   * Meaningful only when `has_argmax` is set.
   */
  uint64_t argmax_k;
  bool has_argmax;
  uint64_t terms_examined;
  double tail_bound;
  bool certified;
} MaxprodEval;

typedef struct MaxprodModulus {
  double delta;
  double lower;
  /**
   * Meaningful only when `has_upper` is set.
   */
  double upper;
  bool has_upper;
  size_t grid_points;
  double domain_max;
} MaxprodModulus;

typedef struct MaxprodHypotheses {
  bool pow_cond;
  bool j_cond;
  bool n_cond;
} MaxprodHypotheses;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *maxprod_last_error(void);

/**
 * Looks up a registry function by id.
 *
 * # Safety
 * `id` must be a NUL-terminated string and `out` writable.
 */
enum MaxprodStatus maxprod_func_get(const char *id, struct MaxprodFunc **out);

/**
 * `t -> |t - x0|`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MaxprodStatus maxprod_func_phi(double x0, struct MaxprodFunc **out);

/**
 * `t -> max(a f(t), b g(t))`. The inputs stay owned by the caller.
 *
 * # Safety
 * `f` and `g` must be live handles and `out` writable.
 */
enum MaxprodStatus maxprod_func_combine(const struct MaxprodFunc *f,
                                        const struct MaxprodFunc *g,
                                        double a,
                                        double b,
                                        struct MaxprodFunc **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `f` must be null or a handle from this library that has not been freed.
 */
void maxprod_func_free(struct MaxprodFunc *f);

/**
 * The handle's id; owned by the handle.
 *
 * # Safety
 * `f` must be a live handle or null (which yields null).
 */
const char *maxprod_func_id(const struct MaxprodFunc *f);

/**
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum MaxprodStatus maxprod_func_eval(const struct MaxprodFunc *f, double x, double *out);

/**
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum MaxprodStatus maxprod_eval_max_product(const struct MaxprodFunc *f,
                                            uint64_t n,
                                            double x,
                                            double tol,
                                            struct MaxprodEval *out);

/**
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum MaxprodStatus maxprod_eval_classical(const struct MaxprodFunc *f,
                                          uint64_t n,
                                          double x,
                                          double tol,
                                          struct MaxprodEval *out);

/**
 * `E_n(x)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MaxprodStatus maxprod_eval_phi_error(uint64_t n,
                                          double x,
                                          double tol,
                                          struct MaxprodEval *out);

/**
 * `ln b_{n,k}(x)`; `-inf` for a zero weight.
 *
 * # Safety
 * `out` must be writable.
 */
enum MaxprodStatus maxprod_log_basis_weight(uint64_t n, uint64_t k, double x, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum MaxprodStatus maxprod_interval_index(uint64_t n, double x, uint64_t *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum MaxprodStatus maxprod_weight_ratio_m(uint64_t n,
                                          uint64_t k,
                                          uint64_t j,
                                          double x,
                                          double *out);

/**
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum MaxprodStatus maxprod_classical_modulus(const struct MaxprodFunc *f,
                                             double delta,
                                             double domain_max,
                                             size_t grid_points,
                                             struct MaxprodModulus *out);

/**
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum MaxprodStatus maxprod_weighted_modulus(const struct MaxprodFunc *f,
                                            double delta,
                                            double domain_max,
                                            size_t grid_points,
                                            struct MaxprodModulus *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum MaxprodStatus maxprod_hypotheses(double x,
                                      uint64_t n,
                                      uint32_t alpha,
                                      struct MaxprodHypotheses *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum MaxprodStatus maxprod_envelope_rhs(double x, uint64_t n, uint32_t alpha, double *out);

/**
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum MaxprodStatus maxprod_rhs_pointwise(const struct MaxprodFunc *f,
                                         double x,
                                         uint64_t n,
                                         uint32_t alpha,
                                         double *out);

/**
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum MaxprodStatus maxprod_rhs_weighted(const struct MaxprodFunc *f,
                                        double x,
                                        uint64_t n,
                                        uint32_t alpha,
                                        double *out);

/**
 * Slope of `ln values[i]` against `ln(ns[i] - 1)`.
 *
 * # Safety
 * `ns` and `values` must each point to `len` readable elements and `out`
 * must be writable.
 */
enum MaxprodStatus maxprod_empirical_order(const uint64_t *ns,
                                           const double *values,
                                           size_t len,
                                           double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MAXPROD_H */
