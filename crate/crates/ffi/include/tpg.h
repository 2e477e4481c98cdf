/* C interface to tpg. Generated by cbindgen; do not edit. */

#ifndef TPG_H
#define TPG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum TpgStatus {
  TPG_STATUS_OK = 0,
  TPG_STATUS_NULL_ARGUMENT = 1,
  TPG_STATUS_INVALID_UTF8 = 2,
  /**
   * The specification or description has errors; see the session's
   * diagnostics.
   */
  TPG_STATUS_DIAGNOSTICS = 3,
  /**
   * Unknown extension, profile or language.
   */
  TPG_STATUS_LOAD = 4,
  /**
   * The session holds no valid specification.
   */
  TPG_STATUS_INVALID_SESSION = 5,
  TPG_STATUS_EMIT = 6,
  TPG_STATUS_RUNTIME = 7,
  /**
   * A buffer or index was out of range.
   */
  TPG_STATUS_OUT_OF_RANGE = 8,
  TPG_STATUS_PANIC = 9,
} TpgStatus;

typedef enum TpgValueKind {
  TPG_VALUE_KIND_INT = 0,
  TPG_VALUE_KIND_STR = 1,
  /**
   * A host pointer passed through untouched.
   */
  TPG_VALUE_KIND_OPAQUE = 2,
} TpgValueKind;

/**
 * Opaque handle.
 */
typedef struct TpgSession TpgSession;

/**
 * A value crossing the boundary. Only the field selected by `kind` is
 * meaningful. Strings handed to the library are copied; strings handed out
 * stay valid until the next call on the session.
 */
typedef struct TpgValue {
  enum TpgValueKind kind;
  int64_t int_value;
  const char *str_value;
  void *opaque;
} TpgValue;

/**
 * Host implementation of an external function. `results` has room for
 * exactly the declared outputs. Any status other than `Ok` aborts the run.
 */
typedef enum TpgStatus (*TpgExternalFn)(void *user,
                                        const struct TpgValue *args,
                                        size_t nargs,
                                        struct TpgValue *results,
                                        size_t nresults);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the
 * library.
 */
const char *tpg_last_error(void);

/**
 * Loads a type-system description and analyses a specification.
 *
 * `description`, `extension` and `profile` may be null; the extension
 * defaults to `declarative`. A session is stored in `*out` whenever the
 * status is `Ok` or `Diagnostics`, and must be released with
 * [`tpg_session_free`].
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum TpgStatus tpg_session_new(const char *spec,
                               const char *description,
                               const char *extension,
                               const char *profile,
                               struct TpgSession **out);

/**
 * # Safety
 * `session` must be null or come from [`tpg_session_new`], and not be used
 * afterwards.
 */
void tpg_session_free(struct TpgSession *session);

/**
 * Number of diagnostics recorded for the session; 0 for null.
 *
 * # Safety
 * `session` must be null or a live session.
 */
size_t tpg_diagnostic_count(const struct TpgSession *session);

/**
 * Rendered diagnostic `index`, or null when out of range. Owned by the
 * session.
 *
 * # Safety
 * `session` must be null or a live session.
 */
const char *tpg_diagnostic(const struct TpgSession *session, size_t index);

/**
 * Emits the ANTLR grammar and the externals interface. Both strings are
 * freed with [`tpg_string_free`]. Either out-parameter may be null.
 *
 * # Safety
 * `session` must be a live session; out-parameters must be null or
 * writable.
 */
enum TpgStatus tpg_emit(const struct TpgSession *session, char **grammar, char **externals);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void tpg_string_free(char *s);

/**
 * Binds the external function `name` to a host callback. `user` is passed
 * back unchanged on every call.
 *
 * # Safety
 * `session` must be a live session; `callback` and `user` must stay valid
 * for as long as the session runs.
 */
enum TpgStatus tpg_bind(struct TpgSession *session,
                        const char *name,
                        TpgExternalFn callback,
                        void *user);

/**
 * Parses `input` from `start_rule` and evaluates `function` (null for the
 * rule's own function). Up to `capacity` outputs are written to `outputs`
 * and their number to `*count`. Output strings stay valid until the next
 * run on the session.
 *
 * # Safety
 * Pointers must be valid for the given lengths; `count` must be writable.
 */
enum TpgStatus tpg_run(struct TpgSession *session,
                       const char *start_rule,
                       const char *function,
                       const struct TpgValue *inputs,
                       size_t ninputs,
                       const char *input,
                       struct TpgValue *outputs,
                       size_t capacity,
                       size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TPG_H */
