#ifndef QIC_H
#define QIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum QicStatus {
  QIC_STATUS_OK = 0,
  QIC_STATUS_NULL_POINTER = 1,
  QIC_STATUS_INVALID_ARGUMENT = 2,
  QIC_STATUS_INVARIANT_VIOLATION = 3,
  QIC_STATUS_NUMERICAL_FAILURE = 4,
  QIC_STATUS_PANIC = 5,
} QicStatus;

/**
 * Opaque Gaussian state handle.
 */
typedef struct QicGaussianState QicGaussianState;

/**
 * Opaque lattice handle: configuration plus its mode matrix.
 */
typedef struct QicLattice QicLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qic_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next call into the library from this thread.
 */
const char *qic_last_error(void);

/**
 * Vacuum of `n_modes` oscillators.
 *
 * # Safety
 * `out_state` must be a valid pointer to a handle slot.
 */
enum QicStatus qic_gaussian_vacuum(size_t n_modes, struct QicGaussianState **out_state);

/**
 * State from a mean of length `2 n_modes` and a row-major covariance of
 * `(2 n_modes)²` entries. Symmetry and the uncertainty relation are checked.
 *
 * # Safety
 * `mean` and `covariance` must point to arrays of the stated lengths.
 */
enum QicStatus qic_gaussian_new(size_t n_modes,
                                const double *mean,
                                const double *covariance,
                                struct QicGaussianState **out_state);

/**
 * # Safety
 * `state` must be NULL or a handle from this library not yet freed.
 */
void qic_gaussian_free(struct QicGaussianState *state);

/**
 * # Safety
 * `state` must be a live handle; `out_modes` a valid pointer.
 */
enum QicStatus qic_gaussian_n_modes(const struct QicGaussianState *state, size_t *out_modes);

/**
 * `max |MΩM − Ω/4|`.
 *
 * # Safety
 * `state` must be a live handle; `out_residual` a valid pointer.
 */
enum QicStatus qic_gaussian_purity_residual(const struct QicGaussianState *state,
                                            double *out_residual);

/**
 * Conjugate QIC vector `u = −ΩMv/(vᵀMv)`; `v` and `u_out` hold `len = 2N`
 * doubles. The state must be pure.
 *
 * # Safety
 * Pointers must be valid for `len` doubles.
 */
enum QicStatus qic_gaussian_conjugate(const struct QicGaussianState *state,
                                      const double *v,
                                      size_t len,
                                      double *u_out);

/**
 * Determinant of the mode covariance of `(v, u(v))` and the mode's
 * entanglement entropy.
 *
 * # Safety
 * `v` must be valid for `len` doubles; output pointers must be valid.
 */
enum QicStatus qic_gaussian_mode_entropy(const struct QicGaussianState *state,
                                         const double *v,
                                         size_t len,
                                         double *out_det,
                                         double *out_entropy);

/**
 * Entropy as a function of `g = √(4 det m − 1)`; negative `g` yields NaN.
 */
double qic_entropy_from_g(double g);

/**
 * # Safety
 * `out_lattice` must be a valid pointer to a handle slot.
 */
enum QicStatus qic_lattice_new(size_t n_sites, double eta, struct QicLattice **out_lattice);

/**
 * # Safety
 * `lattice` must be NULL or a live handle.
 */
void qic_lattice_free(struct QicLattice *lattice);

/**
 * Writes `ω_k`, `k = 1..N`, into `out_omegas` (length `N`).
 *
 * # Safety
 * `out_omegas` must be valid for `len` doubles.
 */
enum QicStatus qic_lattice_dispersion(const struct QicLattice *lattice,
                                      double *out_omegas,
                                      size_t len);

/**
 * Vacuum state of the lattice as a new Gaussian state handle.
 *
 * # Safety
 * `lattice` must be live; `out_state` a valid handle slot.
 */
enum QicStatus qic_lattice_vacuum(const struct QicLattice *lattice,
                                  struct QicGaussianState **out_state);

/**
 * Evolves the weighting vectors `(v, u)` to time `t`. All arrays hold
 * `len = 2N` doubles.
 *
 * # Safety
 * All pointers must be valid for `len` doubles.
 */
enum QicStatus qic_lattice_evolve(const struct QicLattice *lattice,
                                  const double *v,
                                  const double *u,
                                  size_t len,
                                  double t,
                                  double *v_out,
                                  double *u_out);

/**
 * `max |SWAP − (1/d) Σ t_μ ⊗ t_μ|` for local dimension `d`.
 *
 * # Safety
 * `out_residual` must be a valid pointer.
 */
enum QicStatus qic_swap_identity_residual(size_t d, double *out_residual);

/**
 * Builds a QIC for the write `(t̂, Û)` on a pure state and reports its purity.
 *
 * `state` holds `d^N` interleaved complex amplitudes (first site most
 * significant), `generator` the `d × d` matrix `t̂` and `conjugator` the
 * `d^N × d^N` matrix `Û`, or NULL for the identity.
 *
 * # Safety
 * Non-null pointers must be valid for the stated lengths.
 */
enum QicStatus qic_construct_qic_purity(size_t d,
                                        size_t n,
                                        const double *state,
                                        const double *generator,
                                        const double *conjugator,
                                        double *out_purity);

/**
 * `F = 4⟨(ΔT̂)²⟩` for the write `(t̂, Û)`; arguments as in
 * [`qic_construct_qic_purity`].
 *
 * # Safety
 * Non-null pointers must be valid for the stated lengths.
 */
enum QicStatus qic_fisher_information(size_t d,
                                      size_t n,
                                      const double *state,
                                      const double *generator,
                                      const double *conjugator,
                                      double *out_fisher);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QIC_H */
