#ifndef ETALE_KIT_H
#define ETALE_KIT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The first four match the exit codes of the command-line tool.
 */
typedef enum EkStatus {
  EK_STATUS_OK = 0,
  /**
   * Unreadable input: bad JSON, bad UTF-8, wrong lengths.
   */
  EK_STATUS_PARSE = 1,
  /**
   * The input is readable but fails a hypothesis (axioms, *-hom checks, caps).
   */
  EK_STATUS_INVALID = 2,
  /**
   * Internal consistency check failed.
   */
  EK_STATUS_INCONSISTENT = 3,
  EK_STATUS_NULL_ARGUMENT = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  EK_STATUS_PANIC = 5,
} EkStatus;

/**
 * A finite groupoid.
 */
typedef struct EkGroupoid EkGroupoid;

/**
 * A linear map between reduced groupoid C*-algebras in the delta bases.
 */
typedef struct EkHom EkHom;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. The pointer stays
 * valid until the next call into the library on the same thread.
 */
const char *ek_last_error(void);

/**
 * Release a string returned by the library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void ek_string_free(char *s);

/**
 * Parse a groupoid document and check the axioms.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum EkStatus ek_groupoid_from_json(const char *json, struct EkGroupoid **out);

/**
 * Build a standard family from a spec such as `{"family":"pair","params":3}`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum EkStatus ek_groupoid_from_family(const char *spec, struct EkGroupoid **out);

/**
 * # Safety
 * `g` must come from this library and not have been freed already. NULL is ignored.
 */
void ek_groupoid_free(struct EkGroupoid *g);

/**
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum EkStatus ek_groupoid_arrow_count(const struct EkGroupoid *g, size_t *out);

/**
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum EkStatus ek_groupoid_unit_count(const struct EkGroupoid *g, size_t *out);

/**
 * Whether the isotropy interior is just the unit space.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum EkStatus ek_groupoid_is_effective(const struct EkGroupoid *g, bool *out);

/**
 * Canonical JSON document of the groupoid. Free with [`ek_string_free`].
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum EkStatus ek_groupoid_to_json(const struct EkGroupoid *g, char **out);

/**
 * Check raw tables against the axioms. Returns `EK_STATUS_INVALID` when any
 * axiom fails; `report` (may be NULL) receives the list of violations.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `report` must be NULL or writable.
 */
enum EkStatus ek_validate_json(const char *json, char **report);

/**
 * Number of bisections, the empty one included. Fails with
 * `EK_STATUS_INVALID` above `cap` arrows.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum EkStatus ek_bisection_count(const struct EkGroupoid *g, size_t cap, size_t *out);

/**
 * Reduced norm of the element with coefficients `re + i·im` (one per arrow).
 * `im` may be NULL for a real element.
 *
 * # Safety
 * `g` must be a live handle; `re` (and `im` unless NULL) must hold `len`
 * doubles; `out` must be writable.
 */
enum EkStatus ek_reduced_norm(const struct EkGroupoid *g,
                              const double *re,
                              const double *im,
                              size_t len,
                              double *out);

/**
 * A map `C*_r(source) → C*_r(target)` from row-major entries, one row per
 * target arrow. `im` may be NULL.
 *
 * # Safety
 * Both groupoids must be live handles; `re` (and `im` unless NULL) must hold
 * `len` doubles; `out` must be writable.
 */
enum EkStatus ek_hom_new(const struct EkGroupoid *source,
                         const struct EkGroupoid *target,
                         const double *re,
                         const double *im,
                         size_t len,
                         struct EkHom **out);

/**
 * # Safety
 * `m` must come from this library and not have been freed already. NULL is ignored.
 */
void ek_hom_free(struct EkHom *m);

/**
 * Recover `(F, Phi, c)` from a *-homomorphism into an effective groupoid.
 * On success `out` receives a JSON object with keys `F`, `Phi`, `c` and
 * `sigma`; free it with [`ek_string_free`].
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum EkStatus ek_decompose(const struct EkHom *m, char **out);

/**
 * The quotient `H/Iso(H)°` and the fibre-summing map onto it.
 *
 * # Safety
 * `h` must be a live handle; both out-pointers must be writable.
 */
enum EkStatus ek_quotient_star_hom(const struct EkGroupoid *h,
                                   struct EkGroupoid **quotient,
                                   struct EkHom **hom);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ek_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ETALE_KIT_H */
