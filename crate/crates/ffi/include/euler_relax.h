#ifndef EULER_RELAX_H
#define EULER_RELAX_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum ErStatus {
  ER_STATUS_OK = 0,
  ER_STATUS_NULL_POINTER = 1,
  ER_STATUS_INVALID_ARGUMENT = 2,
  ER_STATUS_DOMAIN = 3,
  ER_STATUS_MEAN_NOT_ZERO = 4,
  ER_STATUS_NOT_WAVE_CONE = 5,
  ER_STATUS_EMPTY_SLICE = 6,
  ER_STATUS_INFEASIBLE = 7,
  ER_STATUS_PRECONDITION = 8,
  ER_STATUS_IO = 9,
  ER_STATUS_FORMAT = 10,
  ER_STATUS_PANIC = 11,
} ErStatus;

/**
 * Opaque sampled field on the space-time torus.
 */
typedef struct ErField ErField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *er_last_error_message(void);

/**
 * `e_kin(ρ, m, M)` for the tracefree `M = [[m11, m12], [m12, -m11]]`.
 *
 * # Safety
 * `out_value` must be a valid pointer.
 */
enum ErStatus er_kinetic_energy_density(double rho,
                                        double m1,
                                        double m2,
                                        double m11,
                                        double m12,
                                        double *out_value);

/**
 * Lifted state `(ρ, m1, m2, M11, M12, Q)` of a fluid state.
 *
 * # Safety
 * `out_z` must point to 6 writable doubles.
 */
enum ErStatus er_lift(double rho, double m1, double m2, double *out_z);

/**
 * `Q - ρ² - e_kin` of a lifted state.
 *
 * # Safety
 * `z` must point to 6 doubles and `out_value` be valid.
 */
enum ErStatus er_subsolution_margin(const double *z, double *out_value);

/**
 * Relative wave-cone distance of `z` and a minimising unit direction.
 *
 * # Safety
 * `z` must point to 6 doubles, `out_omega` to 3 writable doubles.
 */
enum ErStatus er_wavecone_distance(const double *z, double *out_distance, double *out_omega);

/**
 * Numerical rank of the Euler symbol (`which = 0`) or the potential symbol
 * (`which = 1`) at `omega`.
 *
 * # Safety
 * `omega` must point to 3 doubles, `out_rank` be valid.
 */
enum ErStatus er_symbol_rank(const double *omega, uint32_t which, double rel_tol, size_t *out_rank);

/**
 * Frobenius gap between the projectors onto the kernel of the Euler symbol
 * and the image of the potential symbol.
 *
 * # Safety
 * `omega` must point to 3 doubles, `out_gap` be valid.
 */
enum ErStatus er_projector_gap(const double *omega, double *out_gap);

/**
 * Distance from `z` to the constitutive set with parameters `(eta, big_r, q_level)`.
 *
 * # Safety
 * `z` must point to 6 doubles, `out_distance` be valid.
 */
enum ErStatus er_constitutive_distance(const double *z,
                                       double eta,
                                       double big_r,
                                       double q_level,
                                       double *out_distance);

/**
 * Hausdorff distance between the hulls of two vertex lists (row-major,
 * `dim` coordinates per vertex).
 *
 * # Safety
 * `p` and `q` must point to `p_count * dim` and `q_count * dim` doubles.
 */
enum ErStatus er_hausdorff_distance(const double *p,
                                    size_t p_count,
                                    const double *q,
                                    size_t q_count,
                                    size_t dim,
                                    double *out_distance);

/**
 * Creates a field from row-major `(t, x, y, component)` values.
 *
 * # Safety
 * `values` must point to `len` doubles and `out_field` be valid.
 */
enum ErStatus er_field_new(size_t n_t,
                           size_t n_x,
                           size_t n_y,
                           double period_t,
                           size_t components,
                           const double *values,
                           size_t len,
                           struct ErField **out_field);

/**
 * Releases a field; null is ignored.
 *
 * # Safety
 * `f` must come from this library and not be used afterwards.
 */
void er_field_free(struct ErField *f);

/**
 * Grid sizes `(n_t, n_x, n_y)` and component count.
 *
 * # Safety
 * `f` must be a live handle and `out_dims` point to 4 writable values.
 */
enum ErStatus er_field_shape(const struct ErField *f, size_t *out_dims);

/**
 * Copies the values of `f` into `buf`, which must hold exactly as many
 * doubles as the field.
 *
 * # Safety
 * `f` must be a live handle and `buf` point to `len` writable doubles.
 */
enum ErStatus er_field_copy_values(const struct ErField *f, double *buf, size_t len);

/**
 * Reads a binary field (and its `.json` sidecar when present).
 *
 * # Safety
 * `p` must be a nul-terminated string and `out_field` valid.
 */
enum ErStatus er_field_read(const char *p, struct ErField **out_field);

/**
 * Writes a binary field and its `.json` sidecar.
 *
 * # Safety
 * `f` must be a live handle and `p` a nul-terminated string.
 */
enum ErStatus er_field_write(const struct ErField *f, const char *p);

/**
 * Euler operator applied to a 6-component field.
 *
 * # Safety
 * `z` must be a live handle and `out_field` valid.
 */
enum ErStatus er_apply_euler_operator(const struct ErField *z, struct ErField **out_field);

/**
 * Potential operator applied to a 9-component field.
 *
 * # Safety
 * `w` must be a live handle and `out_field` valid.
 */
enum ErStatus er_apply_potential_operator(const struct ErField *w, struct ErField **out_field);

/**
 * Vector potential of a mean-zero divergence-free 3-component field.
 *
 * # Safety
 * `u` must be a live handle and `out_field` valid.
 */
enum ErStatus er_curl_inverse(const struct ErField *u, double rel_tol, struct ErField **out_field);

/**
 * Potential `w` with `B_E w = z`; reports the relative residual and fails
 * with `Precondition` when it exceeds `rel_tol`.
 *
 * # Safety
 * `z` must be a live handle; `out_field` and `out_residual` valid.
 */
enum ErStatus er_solve_potential(const struct ErField *z,
                                 double rel_tol,
                                 struct ErField **out_field,
                                 double *out_residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EULER_RELAX_H */
