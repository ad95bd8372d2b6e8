#ifndef NEARCURVE_H
#define NEARCURVE_H

/* Generated from src/lib.rs by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Counting method selector.
 */
typedef enum NcMethod {
  NC_METHOD_NAIVE = 0,
  NC_METHOD_FAST = 1,
  NC_METHOD_EXACT = 2,
} NcMethod;

/**
 * Result codes. Zero is success.
 */
typedef enum NcStatus {
  NC_STATUS_OK = 0,
  /**
   * Malformed or out-of-range input.
   */
  NC_STATUS_INVALID_ARGUMENT = 1,
  /**
   * A numeric procedure failed to meet its contract.
   */
  NC_STATUS_NUMERIC = 2,
  /**
   * A required pointer was null.
   */
  NC_STATUS_NULL_POINTER = 3,
  /**
   * Reading or writing output failed.
   */
  NC_STATUS_IO = 4,
  /**
   * An internal panic was caught at the boundary.
   */
  NC_STATUS_INTERNAL = 5,
} NcStatus;

/**
 * A curve together with its working interval.
 */
typedef struct NcCurve NcCurve;

/**
 * A completed scan.
 */
typedef struct NcScanTable NcScanTable;

/**
 * One count with its main term.
 */
typedef struct NcCount {
  uint64_t q;
  double delta;
  uint64_t n;
  uint64_t ambiguous;
  double main_term;
  double residual;
} NcCount;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a success.
 * Valid until the next call on the same thread.
 */
const char *nc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nc_version(void);

/**
 * Parses a curve such as `poly:0,0,1` or `cos; interval:-1,1`. `interval`
 * (for example `0,1` or `-1/2,1/2`) may be null when the curve text names one.
 *
 * # Safety
 * `spec` and a non-null `interval` must be NUL-terminated strings; `out_curve` must be writable.
 */
enum NcStatus nc_curve_new(const char *spec, const char *interval, struct NcCurve **out_curve);

/**
 * Releases a curve. Null is ignored.
 *
 * # Safety
 * `curve` must come from `nc_curve_new` and not be freed twice.
 */
void nc_curve_free(struct NcCurve *curve);

/**
 * Counts rationals a/q with q <= `q_max` in the interval and ||q f(a/q)|| < delta.
 * `delta` is a decimal (`0.1`) or a fraction (`1/10`); `Exact` needs a fraction.
 *
 * # Safety
 * `curve` must be a live handle, `delta` a NUL-terminated string, `result` writable.
 */
enum NcStatus nc_count(const struct NcCurve *curve,
                       uint64_t q_max,
                       const char *delta,
                       enum NcMethod method,
                       struct NcCount *result);

/**
 * Counts rationals a/q with q <= `q_max` lying exactly on a polynomial curve.
 *
 * # Safety
 * `curve` must be a live handle and `result` writable.
 */
enum NcStatus nc_on_curve_count(const struct NcCurve *curve, uint64_t q_max, uint64_t *result);

/**
 * Sum of e(k q f(a/q)) over the sequence points with q <= `q_max`.
 *
 * # Safety
 * `curve` must be a live handle; `re` and `im` writable.
 */
enum NcStatus nc_exp_sum(const struct NcCurve *curve,
                         uint64_t q_max,
                         int64_t k,
                         double *re,
                         double *im);

/**
 * Legendre dual of the curve restricted to [lo, hi], evaluated at slope `y`.
 *
 * # Safety
 * `curve` must be a live handle and `result` writable.
 */
enum NcStatus nc_dual_eval(const struct NcCurve *curve,
                           double lo,
                           double hi,
                           double y,
                           double *result);

/**
 * Error envelope shape for a type-`d` curve. Never fails.
 */
double nc_error_bound(uint32_t d, double q, double delta, double eps);

/**
 * Counts over the grid `qs` x `deltas` with the given method. `deltas` is a
 * comma-separated list such as `0.1,1/4`. Failed grid points are recorded in
 * the table rather than failing the scan.
 *
 * # Safety
 * `curve` must be a live handle, `qs` must point to `n_qs` values, `deltas`
 * must be a NUL-terminated string and `out_table` writable.
 */
enum NcStatus nc_scan(const struct NcCurve *curve,
                      const uint64_t *qs,
                      size_t n_qs,
                      const char *deltas,
                      enum NcMethod method,
                      struct NcScanTable **out_table);

/**
 * Number of successful rows in a scan table.
 *
 * # Safety
 * `table` must be a live handle or null (which yields 0).
 */
size_t nc_scan_table_len(const struct NcScanTable *table);

/**
 * Number of grid points that failed during the scan.
 *
 * # Safety
 * `table` must be a live handle or null (which yields 0).
 */
size_t nc_scan_table_error_count(const struct NcScanTable *table);

/**
 * Copies row `index` (ordered by Q, then delta).
 *
 * # Safety
 * `table` must be a live handle and `row` writable.
 */
enum NcStatus nc_scan_table_row(const struct NcScanTable *table, size_t index, struct NcCount *row);

/**
 * Renders the table as CSV with provenance comments. Release with `nc_string_free`.
 *
 * # Safety
 * `table` must be a live handle and `csv` writable.
 */
enum NcStatus nc_scan_table_csv(const struct NcScanTable *table, char **csv);

/**
 * Releases a scan table. Null is ignored.
 *
 * # Safety
 * `table` must come from `nc_scan` and not be freed twice.
 */
void nc_scan_table_free(struct NcScanTable *table);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void nc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEARCURVE_H */
