#ifndef MERMIN_H
#define MERMIN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MerminStatus {
  MERMIN_STATUS_OK = 0,
  MERMIN_STATUS_NULL_POINTER = 1,
  MERMIN_STATUS_INVALID_ARGUMENT = 2,
  // The inputs are well-formed but violate a mathematical precondition.
  MERMIN_STATUS_DOMAIN = 3,
  // A size or search bound would be exceeded.
  MERMIN_STATUS_RESOURCE = 4,
  MERMIN_STATUS_PARSE = 5,
  // A Rust panic was caught at the boundary.
  MERMIN_STATUS_PANIC = 6,
} MerminStatus;

// A finite abelian group `Z_{n_1} × … × Z_{n_k}`.
typedef struct MerminGroup MerminGroup;

// A Mermin scenario: rows of per-party phases.
typedef struct MerminScenario MerminScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next call into this library on the same thread.
const char *mermin_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library, freed once.
void mermin_string_free(char *s);

// Library version as a static NUL-terminated string.
const char *mermin_version(void);

// # Safety
// `factors` must point to `len` readable values; `out` must be writable.
enum MerminStatus mermin_group_new(const uint64_t *factors, size_t len, struct MerminGroup **out);

// # Safety
// `g` must be null or a handle from [`mermin_group_new`], freed once.
void mermin_group_free(struct MerminGroup *g);

// # Safety
// `g` must be a live handle; `out` must be writable.
enum MerminStatus mermin_group_order(const struct MerminGroup *g, uint64_t *out);

// Decides whether `g` is a trivial extension of the subgroup generated by
// `n_gens` elements, given row-major in `coords` (`n_gens × rank`). On a
// non-trivial verdict `out_witness` (if not null) receives the witness
// system as text; otherwise it is set to null.
//
// # Safety
// Pointers must be valid for the sizes described; `out_witness` may be null.
enum MerminStatus mermin_ext_check(const struct MerminGroup *g,
                                   const int64_t *coords,
                                   size_t n_gens,
                                   bool *out_trivial,
                                   char **out_witness);

// Locality check for the relational pair on `G × H`.
//
// # Safety
// `g` and `h` must be live handles; `out_trivial` must be writable.
enum MerminStatus mermin_frel_locality(const struct MerminGroup *g,
                                       const struct MerminGroup *h,
                                       bool *out_trivial);

// Parses a scenario from its JSON form (`{"D", "N", "rows"}`).
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum MerminStatus mermin_scenario_from_json(const char *json, struct MerminScenario **out);

// A built-in scenario: `"classic-322"` or `"qutrit-five-party"`.
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum MerminStatus mermin_scenario_preset(const char *name, struct MerminScenario **out);

// # Safety
// `s` must be null or a scenario handle from this library, freed once.
void mermin_scenario_free(struct MerminScenario *s);

// Local hidden variable check. `mode` is `"parity"` or `"possibilistic"`.
// `out_exists` receives 1 (a model exists), 0 (refuted) or -1
// (inconclusive); `out_json`, if not null, receives the full verdict.
//
// # Safety
// `s` must be a live handle; `mode` a NUL-terminated string; `out_json` may
// be null.
enum MerminStatus mermin_lhv_check(const struct MerminScenario *s,
                                   const char *mode,
                                   double tol,
                                   uint64_t bound,
                                   int32_t *out_exists,
                                   char **out_json);

// Effectiveness condition for phase `b` (comma-separated turns, e.g.
// `"1/9,8/9"`).
//
// # Safety
// `b` must be a NUL-terminated string; outputs must be writable.
enum MerminStatus mermin_newcond(size_t d,
                                 size_t v,
                                 size_t beta,
                                 const char *b,
                                 double tol,
                                 bool *out_effective,
                                 double *out_residual);

// Number of effective measurement pairs for `n` parties on the grid with
// `q` steps per turn. `policy` is `"canonical"`, `"cyclic"` or `"max-beta"`.
//
// # Safety
// `policy` must be a NUL-terminated string; `out_count` must be writable.
enum MerminStatus mermin_pairs_count(size_t n,
                                     size_t d,
                                     size_t q,
                                     const char *policy,
                                     double tol,
                                     uint64_t bound,
                                     size_t *out_count);

// Runs the protocol for a JSON configuration and writes a JSON report to
// `out_json`. `attack` is `"none"`, `"withhold:<player>"`, `"pre-phase"`
// or `"device-independent"`.
//
// # Safety
// `config_json` and `attack` must be NUL-terminated strings; `out_json`
// must be writable.
enum MerminStatus mermin_qss_run_json(const char *config_json,
                                      const char *attack,
                                      double tol,
                                      char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MERMIN_H */
