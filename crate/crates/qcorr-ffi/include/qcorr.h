#ifndef QCORR_H
#define QCORR_H

/* generated by cbindgen from qcorr-ffi; do not edit */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every C-facing call.
 */
typedef enum QcorrStatus {
  QcorrStatus_Ok = 0,
  QcorrStatus_NullArgument = 1,
  /**
   * Argument outside its documented domain (entropy grammar, theta, ...).
   */
  QcorrStatus_InvalidArgument = 2,
  /**
   * The state failed Hermiticity/trace/positivity validation.
   */
  QcorrStatus_InvalidState = 3,
  QcorrStatus_ParseError = 4,
} QcorrStatus;

/**
 * How a report's value was obtained.
 */
typedef enum QcorrMethod {
  QcorrMethod_ClosedForm = 0,
  QcorrMethod_GridRefine = 1,
} QcorrMethod;

/**
 * Opaque two-qubit state handle.
 */
typedef struct QcorrState QcorrState;

/**
 * Mirror of the library's optimizer options.
 */
typedef struct QcorrOptions {
  /**
   * Coarse grid resolution (nominal polar count).
   */
  uint32_t grid_n;
  /**
   * Angle tolerance of the local refinement.
   */
  double xtol;
  /**
   * Iteration cap of the local refinement.
   */
  uint32_t max_iter;
  /**
   * Use quadratic/cubic closed forms where possible.
   */
  bool allow_closed;
  /**
   * Value difference below which minima count as tied.
   */
  double value_tie;
} QcorrOptions;

/**
 * Minimization result: value, direction (unit vector and angles),
 * conditional spectrum, stationarity residual and flags.
 */
typedef struct QcorrReport {
  double value;
  double k[3];
  double gamma;
  double phi;
  double cond_spectrum[4];
  double residual;
  enum QcorrMethod method;
  bool degenerate;
  bool singular;
  bool converged;
} QcorrReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fills `out` with the library defaults.
 *
 * # Safety
 * `out` must point to writable memory for one `QcorrOptions`.
 */
enum QcorrStatus qcorr_options_default(struct QcorrOptions *out);

/**
 * Creates a state from Bloch data: two 3-vectors and the row-major 3x3
 * correlation matrix. The reconstructed density matrix is validated.
 *
 * # Safety
 * `r_a`, `r_b` must point to 3 doubles, `j` to 9, `out` to a writable
 * handle slot.
 */
enum QcorrStatus qcorr_state_from_bloch(const double *r_a,
                                        const double *r_b,
                                        const double *j,
                                        struct QcorrState **out);

/**
 * Creates a state from a 4x4 density matrix given as separate row-major
 * real and imaginary parts (16 doubles each).
 *
 * # Safety
 * `re` and `im` must point to 16 doubles each; `out` to a writable handle
 * slot.
 */
enum QcorrStatus qcorr_state_from_density(const double *re,
                                          const double *im,
                                          struct QcorrState **out);

/**
 * Creates a state from the JSON file grammar (bloch or rho shape).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` a writable handle slot.
 */
enum QcorrStatus qcorr_state_from_json(const char *text, struct QcorrState **out);

/**
 * Mixture of two aligned spins at angle +-theta from z (theta in [0, pi/2]).
 *
 * # Safety
 * `out` must be a writable handle slot.
 */
enum QcorrStatus qcorr_state_aligned(double theta, struct QcorrState **out);

/**
 * State with maximally mixed marginals and diagonal correlations.
 *
 * # Safety
 * `out` must be a writable handle slot.
 */
enum QcorrStatus qcorr_state_bell_diagonal(double jx,
                                           double jy,
                                           double jz,
                                           struct QcorrState **out);

/**
 * Releases a state handle. Null is a no-op.
 *
 * # Safety
 * `state` must be null or a handle from a `qcorr_state_*` constructor,
 * not freed before.
 */
void qcorr_state_free(struct QcorrState *state);

/**
 * Copies the Bloch data out of a handle (r_a, r_b: 3 doubles; j: 9
 * row-major doubles).
 *
 * # Safety
 * `state` must be a live handle; the outputs must have the stated room.
 */
enum QcorrStatus qcorr_state_bloch(const struct QcorrState *state,
                                   double *r_a,
                                   double *r_b,
                                   double *j);

/**
 * Minimal information loss for the entropy named by `entropy`
 * (optimizer options may be null for defaults).
 *
 * # Safety
 * `state` must be a live handle, `entropy` NUL-terminated, `options` null
 * or valid, `out` writable.
 */
enum QcorrStatus qcorr_measure(const struct QcorrState *state,
                               const char *entropy,
                               const struct QcorrOptions *options,
                               struct QcorrReport *out);

/**
 * Quantum discord under projective measurements (von Neumann entropy).
 *
 * # Safety
 * `state` must be a live handle, `options` null or valid, `out` writable.
 */
enum QcorrStatus qcorr_discord(const struct QcorrState *state,
                               const struct QcorrOptions *options,
                               struct QcorrReport *out);

/**
 * Dense-grid oracle value for cross-checking (grid clamped below at 8).
 *
 * # Safety
 * `state` must be a live handle, `entropy` NUL-terminated, `value`
 * writable; `k` may be null or point to 3 doubles.
 */
enum QcorrStatus qcorr_oracle_value(const struct QcorrState *state,
                                    const char *entropy,
                                    uint32_t grid,
                                    double *value,
                                    double *k);

/**
 * Concurrence of the state.
 *
 * # Safety
 * `state` must be a live handle; `out` writable.
 */
enum QcorrStatus qcorr_concurrence(const struct QcorrState *state, double *out);

/**
 * Entanglement of formation from a concurrence in [0, 1].
 *
 * # Safety
 * `out` must point to writable memory for one double.
 */
enum QcorrStatus qcorr_entanglement_of_formation(double concurrence, double *out);

/**
 * Static version string of the underlying library.
 */
const char *qcorr_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCORR_H */
