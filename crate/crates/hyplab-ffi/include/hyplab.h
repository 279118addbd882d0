/* C interface to the hyplab hyperbolic lattice-point laboratory. */

#ifndef HYPLAB_H
#define HYPLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum HyplabStatus {
  HYPLAB_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  HYPLAB_STATUS_NULL_POINTER = 1,
  /**
   * Arguments outside the documented domain.
   */
  HYPLAB_STATUS_INVALID_INPUT = 2,
  /**
   * Malformed or insufficient data.
   */
  HYPLAB_STATUS_DATA_ERROR = 3,
  /**
   * A numerical method failed to converge.
   */
  HYPLAB_STATUS_NUMERIC_ERROR = 4,
  /**
   * An internal invariant failed; the library state is still sound.
   */
  HYPLAB_STATUS_PANIC = 5,
} HyplabStatus;

/**
 * Opaque set of Heegner points and reduced forms of one discriminant.
 */
typedef struct HyplabHeegnerSet HyplabHeegnerSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *hyplab_version(void);

/**
 * Static description of a status code.
 */
const char *hyplab_status_message(enum HyplabStatus status);

/**
 * Builds the Heegner set of a fundamental discriminant d < 0. On success
 * writes an owned handle to `out`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HyplabStatus hyplab_heegner_new(int64_t d, struct HyplabHeegnerSet **out);

/**
 * Releases a handle from `hyplab_heegner_new`. Null is a no-op.
 *
 * # Safety
 * `set` must be a handle from `hyplab_heegner_new`, not yet freed.
 */
void hyplab_heegner_free(struct HyplabHeegnerSet *set);

/**
 * Class number h(D) of the handle's discriminant.
 *
 * # Safety
 * `set` must be a live handle; `out` must be a valid pointer.
 */
enum HyplabStatus hyplab_heegner_class_number(const struct HyplabHeegnerSet *set, uint64_t *out);

/**
 * The index-th Heegner point (order matches the reduced-form enumeration).
 *
 * # Safety
 * `set` must be a live handle; `out_x` and `out_y` must be valid pointers.
 */
enum HyplabStatus hyplab_heegner_point(const struct HyplabHeegnerSet *set,
                                       size_t index,
                                       double *out_x,
                                       double *out_y);

/**
 * The index-th reduced form (a, b, c).
 *
 * # Safety
 * `set` must be a live handle; `out_a`, `out_b`, `out_c` must be valid
 * pointers.
 */
enum HyplabStatus hyplab_heegner_form(const struct HyplabHeegnerSet *set,
                                      size_t index,
                                      int64_t *out_a,
                                      int64_t *out_b,
                                      int64_t *out_c);

/**
 * Class number without building a handle.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HyplabStatus hyplab_class_number(int64_t d, uint64_t *out);

/**
 * Lattice count N(z, w, X) with z = zx + i zy, w = wx + i wy, and the
 * signed deviation from the main term 3X.
 *
 * # Safety
 * `out_count` and `out_error` must be valid pointers.
 */
enum HyplabStatus hyplab_count(double zx,
                               double zy,
                               double wx,
                               double wy,
                               double x,
                               uint64_t *out_count,
                               double *out_error);

/**
 * Ball-kernel transform h_R(t) at real t.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HyplabStatus hyplab_sht_ball(double r, double t, double *out);

/**
 * Smoothed-kernel transform at level X and width delta; `plus` nonzero
 * selects the majorant.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HyplabStatus hyplab_sht_smoothed(double x, double delta, int32_t plus, double t, double *out);

/**
 * Riemann zeta at s = re + i im.
 *
 * # Safety
 * `out_re` and `out_im` must be valid pointers.
 */
enum HyplabStatus hyplab_zeta(double re, double im, double *out_re, double *out_im);

/**
 * Gamma function at s = re + i im.
 *
 * # Safety
 * `out_re` and `out_im` must be valid pointers.
 */
enum HyplabStatus hyplab_cgamma(double re, double im, double *out_re, double *out_im);

/**
 * Dirichlet L-function L(s, chi_d) for the quadratic character of a
 * fundamental discriminant d.
 *
 * # Safety
 * `out_re` and `out_im` must be valid pointers.
 */
enum HyplabStatus hyplab_dirichlet_l(double re,
                                     double im,
                                     int64_t d,
                                     double *out_re,
                                     double *out_im);

/**
 * K-Bessel function K_nu(y) for complex order nu = nu_re + i nu_im, y > 0.
 *
 * # Safety
 * `out_re` and `out_im` must be valid pointers.
 */
enum HyplabStatus hyplab_kbessel(double nu_re,
                                 double nu_im,
                                 double y,
                                 double *out_re,
                                 double *out_im);

/**
 * Eisenstein series E(z, 1/2 + it) at z = zx + i zy with automatic
 * truncation.
 *
 * # Safety
 * `out_re` and `out_im` must be valid pointers.
 */
enum HyplabStatus hyplab_eisenstein(double zx, double zy, double t, double *out_re, double *out_im);

/**
 * Both sides of the Weyl-sum identity at (d, t): the direct sum of
 * E(z, 1/2+it) over the Heegner points, the L-function side, and their
 * distance.
 *
 * # Safety
 * All five out-pointers must be valid.
 */
enum HyplabStatus hyplab_weyl_sum_eisenstein(int64_t d,
                                             double t,
                                             double *out_direct_re,
                                             double *out_direct_im,
                                             double *out_formula_re,
                                             double *out_formula_im,
                                             double *out_residual);

/**
 * Spectral exponential sum over the eigenvalues in `values[0..len]` that
 * are at most t_max: sum of X^{i t_j}. Entries must be positive reals.
 *
 * # Safety
 * `values` must point to `len` readable doubles (null is allowed only with
 * `len == 0`); `out_re` and `out_im` must be valid pointers.
 */
enum HyplabStatus hyplab_spectral_exp_sum(const double *values,
                                          size_t len,
                                          double t_max,
                                          double x,
                                          double *out_re,
                                          double *out_im);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* HYPLAB_H */
