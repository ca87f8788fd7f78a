#ifndef WELDKIT_H
#define WELDKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Pass as `threshold` to [`wk_analyze_gray`] to pick the level automatically.
 */
#define WK_THRESHOLD_AUTO -1

typedef enum WkStatus {
  WK_STATUS_OK = 0,
  WK_STATUS_NULL_POINTER = 1,
  WK_STATUS_INVALID_ARGUMENT = 2,
  WK_STATUS_DATASET = 3,
  WK_STATUS_MODEL = 4,
  WK_STATUS_METRIC = 5,
  WK_STATUS_IMAGE = 6,
  WK_STATUS_LOAD = 7,
  WK_STATUS_PANIC = 99,
} WkStatus;

typedef enum WkModelKind {
  WK_MODEL_KIND_OLS = 0,
  WK_MODEL_KIND_ROBUST = 1,
  WK_MODEL_KIND_SVR = 2,
  WK_MODEL_KIND_FOREST = 3,
} WkModelKind;

typedef enum WkCleanMode {
  WK_CLEAN_MODE_CLOSING = 0,
  WK_CLEAN_MODE_OPENING = 1,
  WK_CLEAN_MODE_NONE = 2,
} WkCleanMode;

/**
 * Opaque trained model.
 */
typedef struct WkModel WkModel;

/**
 * Opaque table of measured regions.
 */
typedef struct WkRegions WkRegions;

typedef struct WkMetrics {
  double mae;
  double mse;
  double rmse;
  double r2;
} WkMetrics;

/**
 * One measured region; lengths in scaled units, areas in squared units,
 * orientation in degrees.
 */
typedef struct WkRegion {
  uint32_t region_id;
  uint64_t pixel_count;
  double area;
  double equivalent_diameter;
  double orientation;
  double major_axis_length;
  double minor_axis_length;
  double perimeter;
  double centroid_x;
  double centroid_y;
} WkRegion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or "" after a success.
 * The pointer stays valid until the next library call on the same thread.
 */
const char *wk_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wk_version(void);

/**
 * Trains a model with default hyperparameters on a row-major feature block.
 *
 * # Safety
 * `features` must point to `n_rows * n_features` doubles, `targets` to
 * `n_rows` doubles, and `out` must be writable. On success `*out` owns a new
 * handle to release with [`wk_model_free`].
 */
enum WkStatus wk_model_train(enum WkModelKind kind,
                             const double *features,
                             size_t n_rows,
                             size_t n_features,
                             const double *targets,
                             uint64_t seed,
                             struct WkModel **out);

/**
 * Trains on all 27 rows of the embedded experimental table.
 *
 * # Safety
 * `out` must be writable; see [`wk_model_train`].
 */
enum WkStatus wk_model_train_table2(enum WkModelKind kind, uint64_t seed, struct WkModel **out);

/**
 * Parses a model file's JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum WkStatus wk_model_load(const char *json, struct WkModel **out);

/**
 * Serializes a model to JSON. Release the string with [`wk_string_free`].
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum WkStatus wk_model_save(const struct WkModel *model, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void wk_string_free(char *s);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum WkStatus wk_model_kind(const struct WkModel *model, enum WkModelKind *out);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum WkStatus wk_model_n_features(const struct WkModel *model, size_t *out);

/**
 * Predicts one row of `n_features` values.
 *
 * # Safety
 * `model` must be a live handle, `x` must point to `n_features` doubles and
 * `out` must be writable.
 */
enum WkStatus wk_model_predict(const struct WkModel *model,
                               const double *x,
                               size_t n_features,
                               double *out);

/**
 * # Safety
 * `model` must be null or a handle from this library, not yet freed.
 */
void wk_model_free(struct WkModel *model);

/**
 * MAE, MSE, RMSE and R² of `predicted` against `actual`.
 *
 * # Safety
 * Both arrays must hold `n` doubles and `out` must be writable.
 */
enum WkStatus wk_evaluate(const double *actual,
                          const double *predicted,
                          size_t n,
                          struct WkMetrics *out);

/**
 * Runs threshold, cleanup, labeling and measurement on an 8-bit grayscale
 * raster. `threshold` is a level in 0..=255 (pixels `>=` it are
 * foreground) or [`WK_THRESHOLD_AUTO`].
 *
 * # Safety
 * `pixels` must point to `width * height` bytes in row-major order and
 * `out` must be writable. Release the result with [`wk_regions_free`].
 */
enum WkStatus wk_analyze_gray(const uint8_t *pixels,
                              uint32_t width,
                              uint32_t height,
                              double scale,
                              int32_t threshold,
                              enum WkCleanMode clean,
                              struct WkRegions **out);

/**
 * # Safety
 * `regions` must be a live handle and `out` writable.
 */
enum WkStatus wk_regions_count(const struct WkRegions *regions, size_t *out);

/**
 * Copies region `index` (0-based, label order) into `out`.
 *
 * # Safety
 * `regions` must be a live handle and `out` writable.
 */
enum WkStatus wk_regions_get(const struct WkRegions *regions, size_t index, struct WkRegion *out);

/**
 * # Safety
 * `regions` must be null or a handle from this library, not yet freed.
 */
void wk_regions_free(struct WkRegions *regions);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WELDKIT_H */
