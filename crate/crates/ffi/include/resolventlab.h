#ifndef RESOLVENTLAB_H
#define RESOLVENTLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Values 1 to 9 match the library error kinds.
 */
typedef enum RlStatus {
  RL_STATUS_OK = 0,
  RL_STATUS_INVALID_PARAMETER = 1,
  RL_STATUS_OUTSIDE_SECTOR = 2,
  RL_STATUS_SPECTRAL_COLLISION = 3,
  RL_STATUS_CUTOFF_PROXIMITY = 4,
  RL_STATUS_NO_EIGENFUNCTIONS = 5,
  RL_STATUS_NO_SYMBOL = 6,
  RL_STATUS_QUADRATURE_NON_CONVERGENCE = 7,
  RL_STATUS_PARSE = 8,
  RL_STATUS_IO = 9,
  RL_STATUS_NULL_POINTER = 10,
  RL_STATUS_PANIC = 11,
} RlStatus;

/**
 * Opaque model spectrum.
 */
typedef struct RlModel RlModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rl_version(void);

/**
 * Copies the last error message of this thread into `buf` (truncated,
 * always NUL-terminated). Returns the full message length, 0 if none.
 *
 * # Safety
 * `buf` must be valid for `len` bytes or null.
 */
size_t rl_last_error_message(char *buf, size_t len);

/**
 * Fourier transform of `1/(tau^m - z^m)` at time `t`.
 *
 * # Safety
 * `out_re` and `out_im` must be valid writable pointers.
 */
enum RlStatus rl_residue_transform(double t,
                                   double z_re,
                                   double z_im,
                                   uint32_t m,
                                   double *out_re,
                                   double *out_im);

/**
 * Membership in the delta-region of the sector and distance to its boundary.
 *
 * # Safety
 * `out_member` and `out_dist` must be valid writable pointers.
 */
enum RlStatus rl_region_member(uint32_t m,
                               double delta,
                               double z_re,
                               double z_im,
                               bool *out_member,
                               double *out_dist);

/**
 * Flat torus with the Euclidean symbol, eigenvalues of `Q` up to `cutoff`.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
enum RlStatus rl_model_torus(size_t n, uint32_t m, double cutoff, struct RlModel **out);

/**
 * Zoll model with clusters `0..=k_max`.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
enum RlStatus rl_model_zoll(size_t n, uint32_t m, size_t k_max, struct RlModel **out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must come from a constructor above and not be freed twice.
 */
void rl_model_free(struct RlModel *model);

/**
 * Eigenvalue count with multiplicity, `#{mu_j < alpha}`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum RlStatus rl_model_count(const struct RlModel *model, double alpha, uint64_t *out);

/**
 * Exact L2 operator norm of the resolvent at `z^m`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum RlStatus rl_l2_resolvent_norm(const struct RlModel *model,
                                   double z_re,
                                   double z_im,
                                   double *out);

/**
 * Parses a complex literal such as `"1+2i"`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; outputs must be writable.
 */
enum RlStatus rl_parse_complex(const char *text, double *out_re, double *out_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESOLVENTLAB_H */
