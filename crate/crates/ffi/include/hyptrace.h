#ifndef HYPTRACE_H
#define HYPTRACE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; 1 through 5 match the command-line exit codes.
 */
typedef enum HtStatus {
  HT_STATUS_OK = 0,
  HT_STATUS_FAILED = 1,
  HT_STATUS_BUDGET_EXCEEDED = 2,
  HT_STATUS_INVALID_INPUT = 3,
  HT_STATUS_WRONG_REGIME = 4,
  HT_STATUS_INSUFFICIENT_DATA = 5,
  HT_STATUS_NULL_POINTER = 6,
  /**
   * A caller-supplied buffer is shorter than the result.
   */
  HT_STATUS_BUFFER_TOO_SMALL = 7,
  HT_STATUS_PANIC = 8,
} HtStatus;

/**
 * A group backend.
 */
typedef struct HtBackend HtBackend;

/**
 * A group element, tied to the backend that created it.
 */
typedef struct HtElement HtElement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ht_last_error(void);

/**
 * # Safety
 * `s` is null or a string returned by this library, not yet freed.
 */
void ht_string_free(char *s);

/**
 * Builds a preset backend (`free2`, `z`, `z3xz3`, `z3xfree2`,
 * `paper-example-3`, `s3`).
 *
 * # Safety
 * `name` is a NUL-terminated string; `out` is writable.
 */
enum HtStatus ht_backend_preset(const char *name, struct HtBackend **out);

/**
 * Builds a backend from a description such as `free(3)` or
 * `direct_product(cyclic(3),free(2))`.
 *
 * # Safety
 * `spec` is a NUL-terminated string; `out` is writable.
 */
enum HtStatus ht_backend_parse(const char *spec, struct HtBackend **out);

/**
 * # Safety
 * `b` is null or a backend handle not yet freed. Elements created from it
 * stay valid after it is freed but can no longer be used with it.
 */
void ht_backend_free(struct HtBackend *b);

/**
 * # Safety
 * `b` is a live backend; `word` is a NUL-terminated string; `out` is writable.
 */
enum HtStatus ht_element_parse(const struct HtBackend *b, const char *word, struct HtElement **out);

/**
 * # Safety
 * `g` is null or an element handle not yet freed.
 */
void ht_element_free(struct HtElement *g);

/**
 * Writes a parseable word for `g`, `e` for the identity.
 *
 * # Safety
 * `b` and `g` are live handles; `out` is writable.
 */
enum HtStatus ht_element_format(const struct HtBackend *b, const struct HtElement *g, char **out);

/**
 * # Safety
 * All handles are live; `out` is writable.
 */
enum HtStatus ht_multiply(const struct HtBackend *b,
                          const struct HtElement *g,
                          const struct HtElement *h,
                          struct HtElement **out);

/**
 * # Safety
 * All handles are live; `out` is writable.
 */
enum HtStatus ht_invert(const struct HtBackend *b,
                        const struct HtElement *g,
                        struct HtElement **out);

/**
 * Word length with respect to the backend's generating set.
 *
 * # Safety
 * All handles are live; `out` is writable.
 */
enum HtStatus ht_word_length(const struct HtBackend *b, const struct HtElement *g, size_t *out);

/**
 * Sphere sizes n_0..n_radius. `out_len` receives radius + 1 even when the
 * buffer is too small.
 *
 * # Safety
 * `b` is live; `out` has `capacity` writable slots; `out_len` is writable.
 */
enum HtStatus ht_sphere_sizes(const struct HtBackend *b,
                              size_t radius,
                              uint64_t budget_bytes,
                              uint64_t *out,
                              size_t capacity,
                              size_t *out_len);

/**
 * Class counts |C(g) ∩ S_l| for l = 0..horizon. `out_exact` is set to
 * false when the counts are lower bounds.
 *
 * # Safety
 * As [`ht_sphere_sizes`]; `g` is live; `out_exact` is writable.
 */
enum HtStatus ht_class_counts(const struct HtBackend *b,
                              const struct HtElement *g,
                              size_t horizon,
                              uint64_t *out,
                              size_t capacity,
                              size_t *out_len,
                              bool *out_exact);

/**
 * Number of finite conjugacy classes meeting the ball of radius `horizon`.
 *
 * # Safety
 * `b` is live; `out` is writable.
 */
enum HtStatus ht_trace_space_dimension(const struct HtBackend *b,
                                       size_t horizon,
                                       uint64_t budget_bytes,
                                       size_t *out);

/**
 * Vanishing certificate for the class of `g` as a JSON document.
 *
 * # Safety
 * `b` and `g` are live; `out` is writable.
 */
enum HtStatus ht_certificate_json(const struct HtBackend *b,
                                  const struct HtElement *g,
                                  double s,
                                  size_t horizon,
                                  char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPTRACE_H */
