#ifndef BPES_H
#define BPES_H

/* Auto-generated from the bpes-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum BpesStatus {
  BPES_STATUS_OK = 0,
  BPES_STATUS_NULL_POINTER = 1,
  BPES_STATUS_INVALID_ARGUMENT = 2,
  BPES_STATUS_NO_POSITIVE_ROOT = 3,
  BPES_STATUS_QUADRATURE_FAILED = 4,
  BPES_STATUS_GRID_OUT_OF_DOMAIN = 5,
  BPES_STATUS_ZERO_FIELD = 6,
  BPES_STATUS_DEGENERATE_DENOMINATOR = 7,
  BPES_STATUS_BUFFER_TOO_SMALL = 8,
  BPES_STATUS_INTERNAL_ERROR = 9,
} BpesStatus;

/**
 * Chain-rule placement in the assembled functional.
 */
typedef enum BpesChainRule {
  BPES_CHAIN_RULE_LITERAL = 0,
  BPES_CHAIN_RULE_SINGLE = 1,
} BpesChainRule;

/**
 * A reconstructed solution grid.
 */
typedef struct BpesField BpesField;

/**
 * A solved expansion: parameters, basis, assembled system, coefficients.
 */
typedef struct BpesRun BpesRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never freed.
 */
const char *bpes_version(void);

/**
 * Static name of a status code; never freed.
 */
const char *bpes_status_name(enum BpesStatus status);

/**
 * Copies the thread-local detail message for the last failure into `buf`
 * (NUL-terminated, truncated to `cap`). Returns the full length including
 * the NUL, or 0 when no error is recorded. `buf` may be null to query the
 * required size.
 *
 * # Safety
 * `buf`, when non-null, must point to at least `cap` writable bytes.
 */
size_t bpes_last_error_message(char *buf, size_t cap);

/**
 * Solves the expansion of order `n0` with explicit physical parameters
 * and writes a new handle to `out`. `quad_nodes = 0` selects the
 * exact-for-polynomials default node count.
 *
 * # Safety
 * `out` must be a valid pointer to a `BpesRun*` slot.
 */
enum BpesStatus bpes_run_new(uint32_t n0,
                             double hbar,
                             double mass,
                             double momentum,
                             double energy,
                             double radius,
                             double coupling,
                             uint32_t quad_nodes,
                             double theta_lo,
                             double theta_hi,
                             enum BpesChainRule chain_rule,
                             struct BpesRun **out);

/**
 * `bpes_run_new` with natural units (hbar = mass = p = E = R = 1),
 * theta on [0, 1], default quadrature, literal chain rule.
 *
 * # Safety
 * `out` must be a valid pointer to a `BpesRun*` slot.
 */
enum BpesStatus bpes_run_default(uint32_t n0, struct BpesRun **out);

/**
 * Releases a run handle. Null is a no-op.
 *
 * # Safety
 * `run` must have come from `bpes_run_new`/`bpes_run_default` and must not
 * be used afterwards.
 */
void bpes_run_free(struct BpesRun *run);

/**
 * Expansion order of the handle (0 for null).
 *
 * # Safety
 * `run` must be a live handle or null.
 */
uint32_t bpes_run_n0(const struct BpesRun *run);

/**
 * Achieved residual functional Omega.
 *
 * # Safety
 * `run` must be a live handle or null; `out` must be writable or null.
 */
enum BpesStatus bpes_run_omega(const struct BpesRun *run, double *out);

/**
 * Euclidean norm of the assembled residual row.
 *
 * # Safety
 * `run` must be a live handle or null; `out` must be writable or null.
 */
enum BpesStatus bpes_run_row_norm(const struct BpesRun *run, double *out);

/**
 * Copies the minimal positive roots mu_1..mu_n0 into `buf` (length must
 * equal n0).
 *
 * # Safety
 * `run` must be a live handle or null; `buf` must hold `len` doubles.
 */
enum BpesStatus bpes_run_roots(const struct BpesRun *run, double *buf, size_t len);

/**
 * Copies the per-root residuals |B_4k(mu_k)|.
 *
 * # Safety
 * `run` must be a live handle or null; `buf` must hold `len` doubles.
 */
enum BpesStatus bpes_run_root_residuals(const struct BpesRun *run, double *buf, size_t len);

/**
 * Copies the solved unit-norm coefficients xi_1..xi_n0.
 *
 * # Safety
 * `run` must be a live handle or null; `buf` must hold `len` doubles.
 */
enum BpesStatus bpes_run_coefficients(const struct BpesRun *run, double *buf, size_t len);

/**
 * Subnormalization constant H_n from the closed formula, for
 * n in 1..=n0.
 *
 * # Safety
 * `run` must be a live handle or null; `out` must be writable or null.
 */
enum BpesStatus bpes_run_subnorm_h(const struct BpesRun *run, uint32_t n, double *out);

/**
 * Reconstructs u and |u|^2 on an nx-by-nt grid over [0, R] x [0, t_m] and
 * writes a new field handle to `out`. When `normalize` is true the t = 0
 * density slice is rescaled to integrate to one.
 *
 * # Safety
 * `run` must be a live handle or null; `out` must point to a `BpesField*`
 * slot.
 */
enum BpesStatus bpes_run_reconstruct(const struct BpesRun *run,
                                     size_t nx,
                                     size_t nt,
                                     bool normalize,
                                     struct BpesField **out);

/**
 * Releases a field handle. Null is a no-op.
 *
 * # Safety
 * `field` must have come from `bpes_run_reconstruct` and must not be used
 * afterwards.
 */
void bpes_field_free(struct BpesField *field);

/**
 * Number of x grid points (0 for null).
 *
 * # Safety
 * `field` must be a live handle or null.
 */
size_t bpes_field_nx(const struct BpesField *field);

/**
 * Number of t grid points (0 for null).
 *
 * # Safety
 * `field` must be a live handle or null.
 */
size_t bpes_field_nt(const struct BpesField *field);

/**
 * Normalization factor that was applied to the field.
 *
 * # Safety
 * `field` must be a live handle or null; `out` must be writable or null.
 */
enum BpesStatus bpes_field_scale(const struct BpesField *field, double *out);

/**
 * Copies the x grid (length must equal nx).
 *
 * # Safety
 * `field` must be a live handle or null; `buf` must hold `len` doubles.
 */
enum BpesStatus bpes_field_x_grid(const struct BpesField *field, double *buf, size_t len);

/**
 * Copies the t grid (length must equal nt).
 *
 * # Safety
 * `field` must be a live handle or null; `buf` must hold `len` doubles.
 */
enum BpesStatus bpes_field_t_grid(const struct BpesField *field, double *buf, size_t len);

/**
 * Copies Re(u), row-major with x as the slow axis (length nx*nt).
 *
 * # Safety
 * `field` must be a live handle or null; `buf` must hold `len` doubles.
 */
enum BpesStatus bpes_field_u_real(const struct BpesField *field, double *buf, size_t len);

/**
 * Copies Im(u), row-major with x as the slow axis (length nx*nt).
 *
 * # Safety
 * `field` must be a live handle or null; `buf` must hold `len` doubles.
 */
enum BpesStatus bpes_field_u_imag(const struct BpesField *field, double *buf, size_t len);

/**
 * Copies |u|^2, row-major with x as the slow axis (length nx*nt).
 *
 * # Safety
 * `field` must be a live handle or null; `buf` must hold `len` doubles.
 */
enum BpesStatus bpes_field_density(const struct BpesField *field, double *buf, size_t len);

/**
 * Probability density at an arbitrary point: exactly zero outside [0, R],
 * the nearest grid sample inside.
 *
 * # Safety
 * `field` must be a live handle or null; `out` must be writable or null.
 */
enum BpesStatus bpes_field_density_at(const struct BpesField *field,
                                      double x,
                                      double t,
                                      double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BPES_H */
