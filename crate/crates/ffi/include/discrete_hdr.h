#ifndef DISCRETE_HDR_H
#define DISCRETE_HDR_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum HdrStatus {
  HDR_STATUS_OK = 0,
  HDR_STATUS_NULL_POINTER = 1,
  HDR_STATUS_INVALID_ARGUMENT = 2,
  HDR_STATUS_PARSE_ERROR = 3,
  HDR_STATUS_INVALID_MASS = 4,
  HDR_STATUS_NOT_TERMINATED = 5,
  HDR_STATUS_BUFFER_TOO_SMALL = 6,
  HDR_STATUS_IO = 7,
  HDR_STATUS_PANIC = 99,
} HdrStatus;

/**
 * A probability mass function over the integers.
 */
typedef struct HdrDistribution HdrDistribution;

/**
 * A computed region together with its search metadata.
 */
typedef struct HdrRegion HdrRegion;

/**
 * Mass callback: returns P(X = x). `user_data` is passed through untouched.
 */
typedef double (*HdrMassCallback)(int64_t x, void *user_data);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a distribution spec such as `binom(10, 0.5)`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HdrStatus hdr_distribution_parse(const char *spec, struct HdrDistribution **out);

/**
 * Builds a distribution from `len` parallel arrays of support points and
 * masses. Masses must sum to one.
 *
 * # Safety
 * `xs` and `masses` must each point to `len` readable values.
 */
enum HdrStatus hdr_distribution_from_table(const int64_t *xs,
                                           const double *masses,
                                           size_t len,
                                           struct HdrDistribution **out);

/**
 * Wraps a mass callback. Bounds are used only where the matching
 * `has_min` / `has_max` flag is set; otherwise that side is unbounded.
 *
 * # Safety
 * `callback` must stay callable with `user_data` until the handle is freed.
 */
enum HdrStatus hdr_distribution_from_callback(HdrMassCallback callback,
                                              void *user_data,
                                              bool has_min,
                                              int64_t min,
                                              bool has_max,
                                              int64_t max,
                                              struct HdrDistribution **out);

/**
 * Evaluates the mass at `x`.
 *
 * # Safety
 * `dist` must be a live handle and `out` a valid pointer.
 */
enum HdrStatus hdr_distribution_mass(const struct HdrDistribution *dist, int64_t x, double *out);

/**
 * # Safety
 * `dist` must be null or a handle not yet freed.
 */
void hdr_distribution_free(struct HdrDistribution *dist);

/**
 * Computes the smallest region with mass at least `cover_prob`.
 * `iter_cap` of zero uses the default limit.
 *
 * # Safety
 * `dist` must be a live handle and `out` a valid pointer.
 */
enum HdrStatus hdr_compute(const struct HdrDistribution *dist,
                           double cover_prob,
                           uint64_t iter_cap,
                           struct HdrRegion **out);

/**
 * # Safety
 * `region` must be null or a handle not yet freed.
 */
void hdr_region_free(struct HdrRegion *region);

/**
 * Number of elements in the region, or 0 for a null handle.
 *
 * # Safety
 * `region` must be null or a live handle.
 */
size_t hdr_region_size(const struct HdrRegion *region);

/**
 * Total mass of the region, or NaN for a null handle.
 *
 * # Safety
 * `region` must be null or a live handle.
 */
double hdr_region_coverage(const struct HdrRegion *region);

/**
 * Number of support elements visited by the search.
 *
 * # Safety
 * `region` must be null or a live handle.
 */
uint64_t hdr_region_search_set_size(const struct HdrRegion *region);

/**
 * Copies the region's elements, ascending, into `buf`.
 *
 * # Safety
 * `buf` must hold `cap` values; `written` must be a valid pointer.
 */
enum HdrStatus hdr_region_elements(const struct HdrRegion *region,
                                   int64_t *buf,
                                   size_t cap,
                                   size_t *written);

/**
 * Copies the elements tied with the region's smallest mass.
 *
 * # Safety
 * `buf` must hold `cap` values; `written` must be a valid pointer.
 */
enum HdrStatus hdr_region_variation_set(const struct HdrRegion *region,
                                        int64_t *buf,
                                        size_t cap,
                                        size_t *written);

/**
 * Checks the optimality certificate of `region` against `dist` over the
 * visited elements and stores the verdict in `ok`.
 *
 * # Safety
 * Both handles must be live, and `region` must come from `dist`.
 */
enum HdrStatus hdr_region_certify(const struct HdrDistribution *dist,
                                  const struct HdrRegion *region,
                                  bool *ok);

/**
 * Text report. Free with [`hdr_string_free`]. Null on a null handle.
 *
 * # Safety
 * `region` must be null or a live handle.
 */
char *hdr_region_render_text(const struct HdrRegion *region);

/**
 * JSON report. Free with [`hdr_string_free`]. Null on failure.
 *
 * # Safety
 * `region` must be null or a live handle.
 */
char *hdr_region_render_json(const struct HdrRegion *region);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void hdr_string_free(char *s);

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *hdr_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *hdr_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DISCRETE_HDR_H */
