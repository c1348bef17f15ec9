#ifndef FOCLITE_H
#define FOCLITE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Load the bundled corpus before the given source.
 */
#define FOC_WITH_CORPUS 1

/**
 * Discharge proof obligations while loading.
 */
#define FOC_PROVE 2

typedef enum FocStatus {
  FOC_STATUS_OK = 0,
  FOC_STATUS_CHECK_FAILED = 1,
  FOC_STATUS_INVALID_ARGUMENT = 2,
  FOC_STATUS_PARSE_ERROR = 3,
  FOC_STATUS_EVAL_ERROR = 4,
  FOC_STATUS_PANIC = 5,
} FocStatus;

typedef struct FocSession FocSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build a session from `source` (may be NULL when `FOC_WITH_CORPUS` is
 * set). The handle is written to `out` even when loading reports errors;
 * the status is `CheckFailed` or `ParseError` in that case.
 *
 * # Safety
 * `source` must be NULL or a valid NUL-terminated string, and `out` a
 * valid pointer.
 */
enum FocStatus foc_session_new(const char *source, uint32_t flags, struct FocSession **out);

/**
 * # Safety
 * `s` must be NULL or a handle from `foc_session_new` not yet freed.
 */
void foc_session_free(struct FocSession *s);

/**
 * Number of diagnostics of any severity.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
size_t foc_session_diagnostic_count(const struct FocSession *s);

/**
 * Report lines, one per line, written to `out`.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum FocStatus foc_session_report(const struct FocSession *s, char **out);

/**
 * Diagnostics as JSON lines, written to `out`.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum FocStatus foc_session_diagnostics(const struct FocSession *s, char **out);

/**
 * Evaluate `expr` in `collection`. On success `out` receives the value in
 * surface syntax; on `EvalError` it receives the diagnostic text.
 *
 * # Safety
 * `s` must be a live handle, the strings NUL-terminated, `out` valid.
 */
enum FocStatus foc_eval(const struct FocSession *s,
                        const char *collection,
                        const char *expr,
                        uint64_t fuel,
                        char **out);

/**
 * # Safety
 * `p` must be NULL or a string returned by this library, not yet freed.
 */
void foc_string_free(char *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOCLITE_H */
