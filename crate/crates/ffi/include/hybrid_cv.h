#ifndef HYBRID_CV_H
#define HYBRID_CV_H

/* Generated with cbindgen:0.29.4 */

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define HCV_KIND_RADIAL 0

#define HCV_KIND_AZIMUTHAL 1

#define HCV_DOF_POL 0

#define HCV_DOF_SPA 1

#define HCV_CONSTRUCTION_COMPOSITE 0

#define HCV_CONSTRUCTION_FACTORED 1

typedef enum HcvStatus {
  HCV_STATUS_OK = 0,
  HCV_STATUS_INVALID_ARGUMENT = 1,
  HCV_STATUS_NULL_POINTER = 2,
  HCV_STATUS_TRUNCATION_NOT_CONVERGED = 3,
  HCV_STATUS_UNSUPPORTED = 4,
  HCV_STATUS_CRITERION_DEGENERATE = 5,
  HCV_STATUS_UNDEFINED_REFERENCE = 6,
  HCV_STATUS_UNREACHABLE_TARGET = 7,
  HCV_STATUS_JSON = 8,
  HCV_STATUS_IO = 9,
  HCV_STATUS_BUFFER_TOO_SMALL = 10,
  HCV_STATUS_PANIC = 11,
} HcvStatus;

/**
 * Opaque Gaussian state.
 */
typedef struct HcvGaussianState HcvGaussianState;

typedef struct HcvDuanReport {
  /**
   * Normalized criterion value; below 1 means entangled.
   */
  double lhs;
  /**
   * Mean over both arms of `|<S_kappa>|`.
   */
  double stokes_cov_bound;
  bool entangled;
  bool warn_asymmetric;
} HcvDuanReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into this library from the same thread.
 */
const char *hcv_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void hcv_string_free(char *s);

/**
 * # Safety
 * `state` must be NULL or a handle returned by this library and not yet freed.
 */
void hcv_state_free(struct HcvGaussianState *state);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum HcvStatus hcv_state_vacuum(size_t num_modes, struct HcvGaussianState **out);

/**
 * Parses `{"num_modes": n, "mean": [...], "cov": [[...], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid handle slot.
 */
enum HcvStatus hcv_state_from_json(const char *json, struct HcvGaussianState **out);

/**
 * JSON form of the state; free it with [`hcv_string_free`].
 *
 * # Safety
 * `state` must be a live handle and `out` a valid pointer.
 */
enum HcvStatus hcv_state_to_json(const struct HcvGaussianState *state, char **out);

/**
 * Number of modes, or 0 for a NULL handle.
 *
 * # Safety
 * `state` must be NULL or a live handle.
 */
size_t hcv_state_num_modes(const struct HcvGaussianState *state);

/**
 * # Safety
 * `state` must be a live handle.
 */
enum HcvStatus hcv_state_displace(struct HcvGaussianState *state,
                                  size_t mode,
                                  double re,
                                  double im);

/**
 * # Safety
 * `state` must be a live handle.
 */
enum HcvStatus hcv_state_squeeze(struct HcvGaussianState *state, size_t mode, double re, double im);

/**
 * # Safety
 * `state` must be a live handle.
 */
enum HcvStatus hcv_state_two_mode_squeeze(struct HcvGaussianState *state,
                                          size_t mode_i,
                                          size_t mode_j,
                                          double re,
                                          double im);

/**
 * # Safety
 * `state` must be a live handle.
 */
enum HcvStatus hcv_state_attenuate(struct HcvGaussianState *state, size_t mode, double eta);

/**
 * # Safety
 * `state` must be a live handle and `out` a valid pointer.
 */
enum HcvStatus hcv_state_is_physical(const struct HcvGaussianState *state, double tol, bool *out);

/**
 * Copies the `2n` means `(x0, p0, x1, p1, ...)` into `buf`.
 *
 * # Safety
 * `state` must be a live handle and `buf` must hold `len` doubles.
 */
enum HcvStatus hcv_state_mean(const struct HcvGaussianState *state, double *buf, size_t len);

/**
 * Copies the `2n × 2n` covariance matrix into `buf`, row-major.
 *
 * # Safety
 * `state` must be a live handle and `buf` must hold `len` doubles.
 */
enum HcvStatus hcv_state_cov(const struct HcvGaussianState *state, double *buf, size_t len);

/**
 * Bright squeezed cylindrical state on its two constituent modes.
 *
 * # Safety
 * `out` must be a valid handle slot.
 */
enum HcvStatus hcv_state_build_cylindrical(uint32_t kind,
                                           double alpha_re,
                                           double alpha_im,
                                           double zeta_re,
                                           double zeta_im,
                                           uint32_t construction,
                                           struct HcvGaussianState **out);

/**
 * Largest element-wise gap between the composite and factored constructions.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HcvStatus hcv_verify_factorization(uint32_t kind,
                                        double alpha_re,
                                        double alpha_im,
                                        double zeta_re,
                                        double zeta_im,
                                        double *out);

/**
 * `e^{-s} cosh s`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HcvStatus hcv_closed_form(double s, double *out);

/**
 * Strong-auxiliary inseparability criterion on a two-mode signal state,
 * auxiliary phases locked to a beam of `kind`.
 *
 * # Safety
 * `state` must be a live handle and `out` a valid pointer.
 */
enum HcvStatus hcv_duan_linearized(const struct HcvGaussianState *state,
                                   uint32_t kind,
                                   uint8_t mu,
                                   uint8_t nu,
                                   uint32_t dof_a,
                                   uint32_t dof_b,
                                   double lo_amplitude,
                                   struct HcvDuanReport *out);

/**
 * Schmidt weights of a 2×2 (polarization × spatial) amplitude matrix given
 * as 8 doubles `re, im` row-major. Writes two weights in non-increasing
 * order and the Schmidt number.
 *
 * # Safety
 * `coeffs` must hold 8 doubles, `lambdas` room for 2, `rank` one.
 */
enum HcvStatus hcv_schmidt(const double *coeffs, double *lambdas, double *rank);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYBRID_CV_H */
