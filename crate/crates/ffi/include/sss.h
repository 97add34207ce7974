#ifndef SSS_H
#define SSS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SssStatus {
  SSS_STATUS_OK = 0,
  SSS_STATUS_INVALID_ARGUMENT = 1,
  SSS_STATUS_NULL_POINTER = 2,
  SSS_STATUS_SOLVER_FAILURE = 3,
  SSS_STATUS_UNSUPPORTED = 4,
  SSS_STATUS_OUT_OF_RANGE = 5,
  SSS_STATUS_BUFFER_TOO_SMALL = 6,
  SSS_STATUS_PANIC = 7,
} SssStatus;

typedef enum SssTailKind {
  SSS_TAIL_KIND_ALGEBRAIC = 0,
  SSS_TAIL_KIND_EXPONENTIAL = 1,
  SSS_TAIL_KIND_TRUNCATED = 2,
} SssTailKind;

/**
 * Eigen-homogeneities `α^±_k`, `k = 1..=max_k`.
 */
typedef struct SssExponentTable SssExponentTable;

/**
 * A self-similar profile `f` on `[0, end)`.
 */
typedef struct SssProfile SssProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sss_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sss_last_error_message(void);

/**
 * Clears the stored error message of this thread.
 */
void sss_clear_error(void);

/**
 * Computes `α^{sign}_k` in dimension `dimension` with default tolerances.
 *
 * # Safety
 * `out_alpha` must be NULL or point to writable memory for one `double`.
 */
enum SssStatus sss_exponent(uint32_t dimension, int32_t sign, uint32_t k, double *out_alpha);

/**
 * Builds the table of `α^±_k` for `k <= max_k`.
 *
 * # Safety
 * `out` must be NULL or point to writable memory for one pointer. On success
 * `*out` owns a table to be released with [`sss_exponent_table_free`].
 */
enum SssStatus sss_exponent_table_new(uint32_t dimension,
                                      uint32_t max_k,
                                      struct SssExponentTable **out);

/**
 * Reads `α^{sign}_k` from a table.
 *
 * # Safety
 * `table` must be NULL or a live handle; `out_alpha` NULL or writable.
 */
enum SssStatus sss_exponent_table_alpha(const struct SssExponentTable *table,
                                        int32_t sign,
                                        uint32_t k,
                                        double *out_alpha);

/**
 * # Safety
 * `table` must be NULL or a handle from [`sss_exponent_table_new`] not yet freed.
 */
void sss_exponent_table_free(struct SssExponentTable *table);

/**
 * Shoots the profile with `f(0) = sign`. When `alpha` is an
 * eigen-homogeneity the result carries the algebraic tail.
 *
 * # Safety
 * `out` must be NULL or point to writable memory for one pointer. On success
 * `*out` must be released with [`sss_profile_free`].
 */
enum SssStatus sss_profile_new(uint32_t dimension,
                               double alpha,
                               int32_t sign,
                               struct SssProfile **out);

/**
 * Evaluates `f(s)` and `f'(s)`. Either output pointer may be NULL.
 *
 * # Safety
 * `profile` must be NULL or a live handle; outputs NULL or writable.
 */
enum SssStatus sss_profile_eval(const struct SssProfile *profile,
                                double s,
                                double *out_f,
                                double *out_fp);

/**
 * Right end of the computed range; `+inf` with an algebraic tail, NaN for NULL.
 *
 * # Safety
 * `profile` must be NULL or a live handle.
 */
double sss_profile_end(const struct SssProfile *profile);

/**
 * Number of sign changes; 0 for NULL.
 *
 * # Safety
 * `profile` must be NULL or a live handle.
 */
size_t sss_profile_zero_count(const struct SssProfile *profile);

/**
 * Copies the zeros into `buf`. `*out_len` receives the number of zeros even
 * when `capacity` is too small.
 *
 * # Safety
 * `profile` NULL or live; `buf` NULL or writable for `capacity` doubles;
 * `out_len` NULL or writable.
 */
enum SssStatus sss_profile_zeros(const struct SssProfile *profile,
                                 double *buf,
                                 size_t capacity,
                                 size_t *out_len);

/**
 * # Safety
 * `profile` NULL or live; `out` NULL or writable.
 */
enum SssStatus sss_profile_tail_kind(const struct SssProfile *profile, enum SssTailKind *out);

/**
 * # Safety
 * `profile` must be NULL or a handle from [`sss_profile_new`] not yet freed.
 */
void sss_profile_free(struct SssProfile *profile);

/**
 * Human-readable name of a status code, static.
 */
const char *sss_status_name(enum SssStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SSS_H */
