#ifndef DIRACSYM_H
#define DIRACSYM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes.
 */
typedef enum DsStatus {
  DS_STATUS_OK = 0,
  DS_STATUS_NULL_POINTER = 1,
  DS_STATUS_INVALID_UTF8 = 2,
  DS_STATUS_CONFIG_ERROR = 3,
  DS_STATUS_JET_ERROR = 4,
  DS_STATUS_INVALID_ARGUMENT = 5,
  DS_STATUS_PANIC = 6,
} DsStatus;

/**
 * A parsed, validated run configuration.
 */
typedef struct DsConfig DsConfig;

/**
 * A truncated power series in `x1..x3, e1..e3` with Gaussian-rational coefficients.
 */
typedef struct DsJet DsJet;

/**
 * The result of `ds_run`.
 */
typedef struct DsOutcome DsOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after a success.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *ds_last_error(void);

/**
 * Library version as a static string.
 */
const char *ds_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ds_string_free(char *s);

/**
 * Parses `key = value` configuration text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DsStatus ds_config_parse(const char *text, struct DsConfig **out);

/**
 * # Safety
 * `cfg` must come from `ds_config_parse` and not have been freed.
 */
void ds_config_free(struct DsConfig *cfg);

/**
 * Runs the configured mode. A failing check is not an error: inspect
 * `ds_outcome_exit_code`.
 *
 * # Safety
 * `cfg` must be a live handle and `out` a valid pointer.
 */
enum DsStatus ds_run(const struct DsConfig *cfg, struct DsOutcome **out);

/**
 * Exit code of the run (0 pass, 1 theorem, 2 self-check, 3 quadrature, 4 config);
 * -1 for a null handle.
 *
 * # Safety
 * `o` must be null or a live handle.
 */
int32_t ds_outcome_exit_code(const struct DsOutcome *o);

/**
 * JSON report; free with `ds_string_free`. Null for a null handle.
 *
 * # Safety
 * `o` must be null or a live handle.
 */
char *ds_outcome_report_json(const struct DsOutcome *o);

/**
 * Plain-text transcript; free with `ds_string_free`. Null for a null handle.
 *
 * # Safety
 * `o` must be null or a live handle.
 */
char *ds_outcome_transcript(const struct DsOutcome *o);

/**
 * # Safety
 * `o` must come from `ds_run` and not have been freed.
 */
void ds_outcome_free(struct DsOutcome *o);

/**
 * Parses a jet such as `1 + x1*e2/3 - i*x3^2` with the given degree budget.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DsStatus ds_jet_parse(const char *text, uint32_t budget, struct DsJet **out);

/**
 * `a + b`; budgets must agree.
 *
 * # Safety
 * `a`, `b` must be live handles and `out` a valid pointer.
 */
enum DsStatus ds_jet_add(const struct DsJet *a, const struct DsJet *b, struct DsJet **out);

/**
 * `a · b` truncated to the budget; budgets must agree.
 *
 * # Safety
 * `a`, `b` must be live handles and `out` a valid pointer.
 */
enum DsStatus ds_jet_mul(const struct DsJet *a, const struct DsJet *b, struct DsJet **out);

/**
 * `1/a`; fails when the constant term is zero.
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum DsStatus ds_jet_invert(const struct DsJet *a, struct DsJet **out);

/**
 * `∂a/∂v` for variable index `v` (0..2 are `x1..x3`, 3..5 are `e1..e3`).
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum DsStatus ds_jet_derivative(const struct DsJet *a, uint32_t var, struct DsJet **out);

/**
 * Text form of a jet, parseable by `ds_jet_parse`; free with `ds_string_free`.
 *
 * # Safety
 * `a` must be null or a live handle.
 */
char *ds_jet_to_string(const struct DsJet *a);

/**
 * # Safety
 * `a` must come from this library and not have been freed.
 */
void ds_jet_free(struct DsJet *a);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIRACSYM_H */
