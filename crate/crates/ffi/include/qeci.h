#ifndef QECI_H
#define QECI_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every entry point.
 */
typedef enum QeciStatus {
  QECI_STATUS_OK = 0,
  QECI_STATUS_NULL_POINTER = 1,
  QECI_STATUS_DIMENSION_MISMATCH = 2,
  QECI_STATUS_NON_FINITE = 3,
  QECI_STATUS_NOT_HERMITIAN = 4,
  QECI_STATUS_NOT_PSD = 5,
  QECI_STATUS_TRACE_NOT_ONE = 6,
  QECI_STATUS_NOT_NORMALIZED = 7,
  QECI_STATUS_OUT_OF_RANGE = 8,
  QECI_STATUS_INVALID_MARGINALS = 9,
  QECI_STATUS_INVALID_DISTRIBUTION = 10,
  QECI_STATUS_NO_CONVERGENCE = 11,
  QECI_STATUS_ZERO_PROBABILITY_CONDITION = 12,
  QECI_STATUS_BUFFER_TOO_SMALL = 13,
  QECI_STATUS_PANIC = 14,
} QeciStatus;

typedef enum QeciDirection {
  QECI_DIRECTION_A_TO_B = 0,
  QECI_DIRECTION_B_TO_A = 1,
  QECI_DIRECTION_TIE = 2,
} QeciDirection;

/**
 * Opaque validated bipartite density matrix.
 */
typedef struct QeciDensity QeciDensity;

/**
 * Entropies in bits; `s_forward = s_cause_fwd + s_exo_fwd`, likewise backward.
 */
typedef struct QeciVerdict {
  enum QeciDirection direction;
  double s_forward;
  double s_backward;
  double s_cause_fwd;
  double s_exo_fwd;
  double s_cause_bwd;
  double s_exo_bwd;
  /**
   * Number of near-degenerate reduced spectra encountered.
   */
  uint32_t warning_count;
} QeciVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the message of the calling thread's last failure into `buf`
 * (NUL-terminated, truncated to `len`). Returns the full message length
 * excluding the terminator, or 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t qeci_last_error(char *buf, size_t len);

/**
 * Validates a row-major `(dim_a·dim_b)²` matrix as a density on `[dim_a, dim_b]`.
 * `im` may be null for a real matrix.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `(dim_a·dim_b)²` doubles;
 * `out` must be writable.
 */
enum QeciStatus qeci_density_new(const double *re,
                                 const double *im,
                                 size_t dim_a,
                                 size_t dim_b,
                                 double tol,
                                 struct QeciDensity **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `rho` must be null or a handle from this library not yet freed.
 */
void qeci_density_free(struct QeciDensity *rho);

/**
 * Writes the total dimension `dim_a·dim_b`.
 *
 * # Safety
 * `rho` must be a live handle; `dim` must be writable.
 */
enum QeciStatus qeci_density_dim(const struct QeciDensity *rho, size_t *dim);

/**
 * Von Neumann entropy in bits.
 *
 * # Safety
 * `rho` must be a live handle; `bits` must be writable.
 */
enum QeciStatus qeci_density_entropy(const struct QeciDensity *rho, double *bits);

/**
 * Copies the validated matrix, row-major, into `re` and `im` (each `len` doubles;
 * `len` must be at least `dim²`). `im` may be null.
 *
 * # Safety
 * `rho` must be a live handle; `re`/`im` must point to `len` writable doubles.
 */
enum QeciStatus qeci_density_copy_matrix(const struct QeciDensity *rho,
                                         double *re,
                                         double *im,
                                         size_t len);

/**
 * Quantum symmetric channel in the computational basis.
 *
 * # Safety
 * `out` must be writable.
 */
enum QeciStatus qeci_channel_qsc(double q, double p, struct QeciDensity **out);

/**
 * Quantum symmetric channel in the Hadamard basis.
 *
 * # Safety
 * `out` must be writable.
 */
enum QeciStatus qeci_channel_gqsc(double q, double p, struct QeciDensity **out);

/**
 * Mixture `q·ρ(γ₁, λ₁) + (1−q)·ρ(γ₂, λ₂)` of depolarized pure inputs.
 *
 * # Safety
 * `out` must be writable.
 */
enum QeciStatus qeci_channel_depolarizing(double q,
                                          double gamma1,
                                          double lambda1,
                                          double gamma2,
                                          double lambda2,
                                          double p,
                                          struct QeciDensity **out);

/**
 * Bell pair sent through a bit-flip channel with probability `p`.
 *
 * # Safety
 * `out` must be writable.
 */
enum QeciStatus qeci_channel_bitflip(double p, struct QeciDensity **out);

/**
 * Infers the causal direction between the two subsystems of `rho`.
 *
 * # Safety
 * `rho` must be a live handle; `verdict` must be writable.
 */
enum QeciStatus qeci_infer(const struct QeciDensity *rho,
                           double tie_tol,
                           struct QeciVerdict *verdict);

/**
 * Entropy in bits of the greedy minimum-entropy coupling of `n_rows`
 * probability rows of `width` entries each, stored contiguously.
 *
 * # Safety
 * `rows` must point to `n_rows·width` doubles; `bits` must be writable.
 */
enum QeciStatus qeci_coupling_entropy(const double *rows,
                                      size_t n_rows,
                                      size_t width,
                                      double *bits);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QECI_H */
