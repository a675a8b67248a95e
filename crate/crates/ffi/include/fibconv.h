#ifndef FIBCONV_H
#define FIBCONV_H

/* Generated by cbindgen from crates/ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every function.
 */
typedef enum FcStatus {
  FC_STATUS_OK = 0,
  /**
   * A check ran and did not hold.
   */
  FC_STATUS_CHECK_FAILED = 1,
  /**
   * Null pointer, bad UTF-8, or an out-of-range argument.
   */
  FC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Spec text did not parse.
   */
  FC_STATUS_PARSE = 3,
  /**
   * The operation is not defined for the given index or spec.
   */
  FC_STATUS_DOMAIN = 4,
  /**
   * Backward extension needs a non-unit trailing coefficient inverted.
   */
  FC_STATUS_NON_INVERTIBLE = 5,
  /**
   * Discovery found no recurrence within the order cap.
   */
  FC_STATUS_UNDETERMINED = 6,
  /**
   * The library panicked; this is a bug.
   */
  FC_STATUS_INTERNAL = 7,
} FcStatus;

/**
 * Opaque identity-check report.
 */
typedef struct FcReport FcReport;

/**
 * Opaque sequence spec.
 */
typedef struct FcSpec FcSpec;

/**
 * Opaque collected weights of the summed expansions.
 */
typedef struct FcWeights FcWeights;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *fc_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void fc_string_free(char *s);

/**
 * Builtin spec by name: `fib`, `lucas` or `tribonacci`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum FcStatus fc_spec_builtin(const char *name, struct FcSpec **out);

/**
 * Parses spec text holding one `seq` statement.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum FcStatus fc_spec_parse(const char *text, struct FcSpec **out);

/**
 * # Safety
 * `spec` must be NULL or a live handle from this library.
 */
void fc_spec_free(struct FcSpec *spec);

/**
 * Order of the recurrence, or 0 for NULL.
 *
 * # Safety
 * `spec` must be NULL or a live handle.
 */
size_t fc_spec_order(const struct FcSpec *spec);

/**
 * Canonical spec text.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum FcStatus fc_spec_format(const struct FcSpec *spec, char **out);

/**
 * `F(n)` as decimal text.
 *
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_fib(int64_t n, char **out);

/**
 * `L(n)` as decimal text.
 *
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_lucas(int64_t n, char **out);

/**
 * Value of `spec` at index `n` (backward extension below the seeds).
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum FcStatus fc_eval_term(const struct FcSpec *spec, int64_t n, char **out);

/**
 * The expansion after `depth - 1` substitutions, as text such as
 * `F(n) = 3*F(n-3) + 2*F(n-4)`.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum FcStatus fc_expand(const struct FcSpec *spec, size_t depth, char **out);

/**
 * Sums the expansions for target index `n`.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum FcStatus fc_collect(const struct FcSpec *spec, int64_t n, struct FcWeights **out);

/**
 * # Safety
 * `w` must be NULL or a live handle.
 */
void fc_weights_free(struct FcWeights *w);

/**
 * Number of weights, `n - 1`.
 *
 * # Safety
 * `w` must be NULL or a live handle.
 */
size_t fc_weights_len(const struct FcWeights *w);

/**
 * Weight `a_k` for `1 <= k <= n-1`.
 *
 * # Safety
 * `w` must be a live handle; `out` must be writable.
 */
enum FcStatus fc_weights_get(const struct FcWeights *w, size_t k, char **out);

/**
 * Number of residual terms.
 *
 * # Safety
 * `w` must be NULL or a live handle.
 */
size_t fc_weights_residual_len(const struct FcWeights *w);

/**
 * The `i`-th residual term (0-based, ascending shift).
 *
 * # Safety
 * `w` must be a live handle; `shift` and `out` must be writable.
 */
enum FcStatus fc_weights_residual_get(const struct FcWeights *w,
                                      size_t i,
                                      size_t *shift,
                                      char **out);

/**
 * Checks the identity for every `n` in `lo..=hi`. Returns `OK` when the
 * check ran, whatever its outcome; inspect the report for pass/fail.
 * `jobs = 0` uses the default worker pool.
 *
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_check_range(int64_t lo, int64_t hi, uint32_t jobs, struct FcReport **out);

/**
 * # Safety
 * `r` must be NULL or a live handle.
 */
void fc_report_free(struct FcReport *r);

/**
 * # Safety
 * `r` must be NULL or a live handle.
 */
bool fc_report_passed(const struct FcReport *r);

/**
 * Least failing index with both sides as decimal text; `CHECK_FAILED`
 * is never returned here, `INVALID_ARGUMENT` means the report passed.
 *
 * # Safety
 * `r` must be a live handle; the out pointers must be writable.
 */
enum FcStatus fc_report_first_failure(const struct FcReport *r, int64_t *n, char **lhs, char **rhs);

/**
 * Replays the inductive step at `m >= 3`; `CHECK_FAILED` if it does not hold.
 */
enum FcStatus fc_inductive_step_check(int64_t m);

/**
 * Discovers and verifies the analogous identity for `spec`, writing it as
 * JSON. Returns `OK` when verified, `CHECK_FAILED` when refuted and
 * `UNDETERMINED` when no recurrence fit; JSON is written in all three cases.
 * `max_order = 0` selects the default cap.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum FcStatus fc_conjecture_json(const struct FcSpec *spec,
                                 int64_t probe_n,
                                 int64_t verify_hi,
                                 size_t max_order,
                                 char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FIBCONV_H */
