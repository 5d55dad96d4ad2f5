#ifndef QKDV_H
#define QKDV_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum QkdvStatus {
  QKDV_STATUS_OK = 0,
  QKDV_STATUS_NULL_POINTER = 1,
  QKDV_STATUS_INVALID_INPUT = 2,
  QKDV_STATUS_NOT_IN_IMAGE = 3,
  QKDV_STATUS_RECURSION_INCONSISTENT = 4,
  QKDV_STATUS_NOT_RECOGNIZED = 5,
  QKDV_STATUS_INSUFFICIENT_ORDER = 6,
  QKDV_STATUS_DEGENERATE_SPECTRUM = 7,
  QKDV_STATUS_CACHE_INVALID = 8,
  QKDV_STATUS_JSON = 9,
  QKDV_STATUS_IO = 10,
  QKDV_STATUS_PANIC = 11,
} QkdvStatus;

/**
 * Hierarchy selector.
 */
typedef enum QkdvMode {
  QKDV_MODE_KDV = 0,
  QKDV_MODE_ILW = 1,
} QkdvMode;

/**
 * Opaque table of Hamiltonian densities `g_k`, `-2 <= k <= k_max`.
 */
typedef struct QkdvTable QkdvTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Computes densities `g_k` for `-2 <= k <= k_max`; `genus` is the ILW cutoff and is ignored for KdV.
 *
 * # Safety
 * `out` must be null or valid for writing a pointer.
 */
enum QkdvStatus qkdv_table_new(enum QkdvMode mode,
                               uint32_t genus,
                               int32_t k_max,
                               struct QkdvTable **out);

/**
 * Releases a table; null is ignored.
 *
 * # Safety
 * `table` must be null or a pointer returned by `qkdv_table_new` that has not been freed.
 */
void qkdv_table_free(struct QkdvTable *table);

/**
 * Largest `k` stored in the table.
 *
 * # Safety
 * `table` must be a live handle and `out` valid for writing.
 */
enum QkdvStatus qkdv_table_k_max(const struct QkdvTable *table, int32_t *out);

/**
 * Renders `g_k`: canonical JSON when `as_json` is true, text otherwise.
 *
 * # Safety
 * `table` must be a live handle and `out` valid for writing; free the result with `qkdv_string_free`.
 */
enum QkdvStatus qkdv_table_density(const struct QkdvTable *table,
                                   int32_t k,
                                   bool as_json,
                                   char **out);

/**
 * Coefficients of the q-series of the quantized `g_k` to `q^order`, as canonical JSON.
 *
 * # Safety
 * `table` must be a live handle and `out` valid for writing; free the result with `qkdv_string_free`.
 */
enum QkdvStatus qkdv_table_qseries(const struct QkdvTable *table,
                                   int32_t k,
                                   uint32_t order,
                                   char **out);

/**
 * Recognizes the q-series of `g_k` as a quasimodular form. `passed` receives whether it is
 * homogeneous of weight `k+2`; `report` (optional) receives the JSON report.
 *
 * # Safety
 * `table` must be a live handle, `passed` valid for writing and `report` null or valid for writing.
 */
enum QkdvStatus qkdv_verify(const struct QkdvTable *table,
                            int32_t k,
                            uint32_t order,
                            bool *passed,
                            char **report);

/**
 * Message describing the last failure on this thread, or null. Valid until the next call.
 */
const char *qkdv_last_error(void);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned by this library that has not been freed.
 */
void qkdv_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *qkdv_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QKDV_H */
