#ifndef HURWITZ_H
#define HURWITZ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum HzStatus {
  HZ_STATUS_OK = 0,
  HZ_STATUS_NULL_POINTER = 1,
  HZ_STATUS_INVALID_UTF8 = 2,
  HZ_STATUS_PARSE = 3,
  HZ_STATUS_DOMAIN = 4,
  HZ_STATUS_DIVISION_BY_ZERO = 5,
  HZ_STATUS_INVALID_ARGUMENT = 6,
  HZ_STATUS_BUDGET_EXCEEDED = 7,
  HZ_STATUS_NON_CONVERGENT = 8,
  HZ_STATUS_IO = 9,
  /**
   * A verification ran but at least one check failed.
   */
  HZ_STATUS_CHECK_FAILED = 10,
  HZ_STATUS_PANIC = 11,
} HzStatus;

/**
 * Digit class returned by [`hz_classify_digit`].
 */
typedef enum HzDigitClass {
  HZ_DIGIT_CLASS_INVALID = 0,
  HZ_DIGIT_CLASS_EXCEPTIONAL = 1,
  HZ_DIGIT_CLASS_REGULAR = 2,
} HzDigitClass;

/**
 * Pressure mode for [`hz_partition_sum`].
 */
typedef enum HzPressureMode {
  HZ_PRESSURE_MODE_SUP_NORM = 0,
  HZ_PRESSURE_MODE_BASE_POINT = 1,
} HzPressureMode;

/**
 * Opaque finite alphabet of IFS branches.
 */
typedef struct HzAlphabet HzAlphabet;

/**
 * Opaque Hurwitz expansion.
 */
typedef struct HzExpansion HzExpansion;

/**
 * `Z_n(s)` with its pressure bracket.
 */
typedef struct HzPressure {
  double s;
  uintptr_t n;
  double log_zn_over_n;
  double lower_bracket;
  double upper_bracket;
} HzPressure;

/**
 * Bowen dimension bracket.
 */
typedef struct HzBowen {
  double s_low;
  double s_high;
  uintptr_t n_used;
  uint32_t iterations;
  bool converged;
} HzBowen;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *hz_last_error_message(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a pointer obtained from this library and not yet freed.
 */
void hz_string_free(char *s);

/**
 * Expands an exact point of `U` written as `"p/q+r/s i"`.
 *
 * # Safety
 * `z` must be a valid C string and `out` a valid pointer.
 */
enum HzStatus hz_expand(const char *z, uintptr_t max_digits, struct HzExpansion **out);

/**
 * Number of digits in the expansion (0 for NULL).
 *
 * # Safety
 * `e` must be NULL or a live handle.
 */
uintptr_t hz_expansion_len(const struct HzExpansion *e);

/**
 * Whether the expansion terminated (the remainder reached 0).
 *
 * # Safety
 * `e` must be NULL or a live handle.
 */
bool hz_expansion_terminated(const struct HzExpansion *e);

/**
 * Writes digit `index` into `re`, `im`.
 *
 * # Safety
 * `e` must be a live handle; `re` and `im` valid pointers.
 */
enum HzStatus hz_expansion_digit(const struct HzExpansion *e,
                                 uintptr_t index,
                                 int64_t *re,
                                 int64_t *im);

/**
 * Releases an expansion handle.
 *
 * # Safety
 * `e` must be NULL or a handle from [`hz_expand`] not yet freed.
 */
void hz_expansion_free(struct HzExpansion *e);

/**
 * Exact value of the word given as `len` pairs `(re, im)` in `digits`,
 * written as a string like `"2/5"` into `*out` (free with [`hz_string_free`]).
 *
 * # Safety
 * `digits` must point to `2 * len` integers (may be NULL when `len` is 0).
 */
enum HzStatus hz_evaluate(const int64_t *digits, uintptr_t len, char **out);

enum HzDigitClass hz_classify_digit(int64_t re, int64_t im);

/**
 * Parses an alphabet such as `"2,2;-2,-2"` or `"[[2,2],[-2,-2]]"`.
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum HzStatus hz_alphabet_parse(const char *text, struct HzAlphabet **out);

/**
 * Number of letters (0 for NULL).
 *
 * # Safety
 * `a` must be NULL or a live handle.
 */
uintptr_t hz_alphabet_len(const struct HzAlphabet *a);

/**
 * Releases an alphabet handle.
 *
 * # Safety
 * `a` must be NULL or a handle from [`hz_alphabet_parse`] not yet freed.
 */
void hz_alphabet_free(struct HzAlphabet *a);

/**
 * `Z_n(s)` over the alphabet, evaluating at most `max_words` words.
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum HzStatus hz_partition_sum(const struct HzAlphabet *a,
                               uintptr_t n,
                               double s,
                               enum HzPressureMode mode,
                               uint64_t max_words,
                               struct HzPressure *out);

/**
 * Bowen dimension bracket of the alphabet.
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum HzStatus hz_bowen_dimension(const struct HzAlphabet *a,
                                 double tol,
                                 uintptr_t n_max,
                                 struct HzBowen *out);

/**
 * Convergence-exponent estimate of the moduli of `ℤ[i]` in norm order.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HzStatus hz_tau_lattice(bool include_zero, uintptr_t horizon, double *out);

/**
 * SVG of the first-level cylinders into `*out` (free with [`hz_string_free`]).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HzStatus hz_tessellate_svg(uint64_t norm_sq_max, bool include_exceptional, char **out);

/**
 * Runs a verification suite and writes the JSON report into `*out`, which
 * is set even when checks fail ([`HzStatus::CheckFailed`]).
 *
 * # Safety
 * `suite` must be a valid C string and `out` a valid pointer.
 */
enum HzStatus hz_verify(const char *suite, uint64_t seed, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HURWITZ_H */
