#ifndef WARPBENCH_H
#define WARPBENCH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of a call. Values match the command-line exit codes where they overlap.
 */
typedef enum WbStatus {
  WB_STATUS_OK = 0,
  WB_STATUS_IO_ERROR = 1,
  WB_STATUS_PARAMETER_ERROR = 2,
  WB_STATUS_CONTRACT_VIOLATION = 3,
  WB_STATUS_NULL_POINTER = 4,
  WB_STATUS_PANIC = 5,
} WbStatus;

typedef enum WbVariationClass {
  WB_VARIATION_CLASS_SCALED = 0,
  WB_VARIATION_CLASS_SCALED_SAME_SIZE = 1,
  WB_VARIATION_CLASS_RGP = 2,
  WB_VARIATION_CLASS_MRGP = 3,
  WB_VARIATION_CLASS_SCALED_RGP = 4,
  WB_VARIATION_CLASS_SCALED_MRGP = 5,
} WbVariationClass;

typedef enum WbVariant {
  WB_VARIANT_DTW = 0,
  WB_VARIANT_DDTW = 1,
  WB_VARIANT_WDTW = 2,
  WB_VARIANT_WDDTW = 3,
} WbVariant;

/**
 * Opaque alignment handle.
 */
typedef struct WbAlignment WbAlignment;

/**
 * Opaque reference/target pair with its ground truth.
 */
typedef struct WbPair WbPair;

/**
 * Opaque series handle.
 */
typedef struct WbSeries WbSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *wb_last_error(void);

/**
 * Copies `len` values into a new series.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum WbStatus wb_series_new(const double *values, size_t len, struct WbSeries **out);

/**
 * Generates a reference signal with default noise and curve exponents.
 *
 * # Safety
 * `out` must be writable.
 */
enum WbStatus wb_generate(size_t length,
                          double min,
                          double max,
                          size_t p1,
                          size_t p2,
                          uint64_t seed,
                          struct WbSeries **out);

/**
 * Number of samples; 0 for NULL.
 *
 * # Safety
 * `series` must be NULL or a live handle.
 */
size_t wb_series_len(const struct WbSeries *series);

/**
 * Borrowed pointer to the samples, valid while the handle lives; NULL for NULL.
 *
 * # Safety
 * `series` must be NULL or a live handle.
 */
const double *wb_series_data(const struct WbSeries *series);

/**
 * # Safety
 * `series` must be NULL or a handle not yet freed.
 */
void wb_series_free(struct WbSeries *series);

/**
 * Deforms `reference` with a random plan of the given class (default ranges).
 *
 * # Safety
 * `reference` must be a live handle; `out` must be writable.
 */
enum WbStatus wb_deform(const struct WbSeries *reference,
                        enum WbVariationClass class_,
                        uint64_t seed,
                        struct WbPair **out);

/**
 * New handle holding a copy of the pair's target.
 *
 * # Safety
 * `pair` must be a live handle; `out` must be writable.
 */
enum WbStatus wb_pair_target(const struct WbPair *pair, struct WbSeries **out);

/**
 * New handle holding a copy of the pair's reference.
 *
 * # Safety
 * `pair` must be a live handle; `out` must be writable.
 */
enum WbStatus wb_pair_reference(const struct WbPair *pair, struct WbSeries **out);

/**
 * Ground-truth source position of every target sample. Writes up to `cap`
 * values and stores the full length in `len`.
 *
 * # Safety
 * `pair` must be a live handle; `positions` must hold `cap` doubles (may be
 * NULL when `cap` is 0); `len` must be writable.
 */
enum WbStatus wb_pair_ground_truth(const struct WbPair *pair,
                                   double *positions,
                                   size_t cap,
                                   size_t *len);

/**
 * # Safety
 * `pair` must be NULL or a handle not yet freed.
 */
void wb_pair_free(struct WbPair *pair);

/**
 * Aligns `x` to `y`. `g` is read only by the weighted variants; a negative
 * `band` means unconstrained.
 *
 * # Safety
 * `x` and `y` must be live handles; `out` must be writable.
 */
enum WbStatus wb_align(const struct WbSeries *x,
                       const struct WbSeries *y,
                       enum WbVariant variant,
                       double g,
                       int64_t band,
                       struct WbAlignment **out);

/**
 * Alignment cost without building the path.
 *
 * # Safety
 * `x` and `y` must be live handles; `out` must be writable.
 */
enum WbStatus wb_distance(const struct WbSeries *x,
                          const struct WbSeries *y,
                          enum WbVariant variant,
                          double g,
                          int64_t band,
                          double *out);

/**
 * Accumulated cost; NaN for NULL.
 *
 * # Safety
 * `al` must be NULL or a live handle.
 */
double wb_alignment_cost(const struct WbAlignment *al);

/**
 * Number of cells on the path; 0 for NULL.
 *
 * # Safety
 * `al` must be NULL or a live handle.
 */
size_t wb_alignment_path_len(const struct WbAlignment *al);

/**
 * Copies up to `cap` path cells into `rows`/`cols`.
 *
 * # Safety
 * `al` must be a live handle; `rows` and `cols` must each hold `cap` entries.
 */
enum WbStatus wb_alignment_path(const struct WbAlignment *al,
                                size_t *rows,
                                size_t *cols,
                                size_t cap);

/**
 * # Safety
 * `al` must be NULL or a handle not yet freed.
 */
void wb_alignment_free(struct WbAlignment *al);

/**
 * Sum of `|x_i - y_j|` along the path.
 *
 * # Safety
 * All handles must be live; `out` must be writable.
 */
enum WbStatus wb_adm(const struct WbAlignment *al,
                     const struct WbSeries *x,
                     const struct WbSeries *y,
                     double *out);

/**
 * Sum of time differences to the pair's ground truth (fractional positions).
 *
 * # Safety
 * All handles must be live; `out` must be writable.
 */
enum WbStatus wb_adt(const struct WbAlignment *al, const struct WbPair *pair, double *out);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wb_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WARPBENCH_H */
