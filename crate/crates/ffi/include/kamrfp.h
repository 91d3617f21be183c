#ifndef KAMRFP_H
#define KAMRFP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. Values 2 to 4 match the exit codes of the command-line tool.
typedef enum KamrfpStatus {
  KAMRFP_STATUS_OK = 0,
  // Parse error, invalid network, infeasible flow or bad `k`.
  KAMRFP_STATUS_INVALID_INPUT = 2,
  // Model size cap or enumeration budget exceeded.
  KAMRFP_STATUS_BUDGET_EXCEEDED = 3,
  // The solver produced a result that failed its own checks.
  KAMRFP_STATUS_INVARIANT_VIOLATION = 4,
  KAMRFP_STATUS_NULL_POINTER = 10,
  // A string argument was not valid UTF-8, or an enum value was out of range.
  KAMRFP_STATUS_INVALID_ARGUMENT = 11,
  // Arc id outside `1..=m`.
  KAMRFP_STATUS_OUT_OF_RANGE = 12,
  KAMRFP_STATUS_PANIC = 13,
} KamrfpStatus;

// Values accepted by the `format` argument of [`kamrfp_network_parse`].
typedef enum KamrfpFormat {
  KAMRFP_FORMAT_DIMACS = 0,
  KAMRFP_FORMAT_JSON = 1,
} KamrfpFormat;

// Values accepted by [`KamrfpSolveOptions::mode`].
typedef enum KamrfpMode {
  KAMRFP_MODE_TWO_PHASE = 0,
  KAMRFP_MODE_COMBINED = 1,
} KamrfpMode;

// Parsed network.
typedef struct KamrfpNetwork KamrfpNetwork;

// Result of a solve, together with the network and `k` it was computed for.
typedef struct KamrfpSolution KamrfpSolution;

typedef struct KamrfpSolveOptions {
  // A [`KamrfpMode`] value.
  uint32_t mode;
  // Run the exhaustive attacker on the result.
  bool certify;
  size_t max_vars;
  // Largest number of k-subsets enumerated during certification.
  uint64_t attack_budget;
} KamrfpSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next failing call on this thread.
const char *kamrfp_last_error_message(void);

// Library version as a static string.
const char *kamrfp_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void kamrfp_string_free(char *s);

struct KamrfpSolveOptions kamrfp_solve_options_default(void);

// Parses a network from NUL-terminated text; `format` is a [`KamrfpFormat`] value.
//
// # Safety
// `text` must be a valid C string and `out` a writable pointer.
enum KamrfpStatus kamrfp_network_parse(const char *text,
                                       uint32_t format,
                                       struct KamrfpNetwork **out);

// # Safety
// `net` must come from [`kamrfp_network_parse`] and not have been freed.
void kamrfp_network_free(struct KamrfpNetwork *net);

// Number of vertices, or 0 for a null handle.
//
// # Safety
// `net` must be null or a live handle.
size_t kamrfp_network_vertex_count(const struct KamrfpNetwork *net);

// Number of real arcs, or 0 for a null handle.
//
// # Safety
// `net` must be null or a live handle.
size_t kamrfp_network_arc_count(const struct KamrfpNetwork *net);

// Solves for `k` deleted arcs. A null `options` means the defaults.
//
// # Safety
// `net` must be a live handle, `options` null or readable, `out` writable.
enum KamrfpStatus kamrfp_solve(const struct KamrfpNetwork *net,
                               size_t k,
                               const struct KamrfpSolveOptions *options,
                               struct KamrfpSolution **out);

// # Safety
// `sol` must come from [`kamrfp_solve`] and not have been freed.
void kamrfp_solution_free(struct KamrfpSolution *sol);

// Maximum flow value as a rational string.
//
// # Safety
// `sol` must be a live handle and `out` writable.
enum KamrfpStatus kamrfp_solution_fstar(const struct KamrfpSolution *sol, char **out);

// Guaranteed residual value after the worst attack.
//
// # Safety
// `sol` must be a live handle and `out` writable.
enum KamrfpStatus kamrfp_solution_theta(const struct KamrfpSolution *sol, char **out);

// Worst-case loss, `fstar - theta`.
//
// # Safety
// `sol` must be a live handle and `out` writable.
enum KamrfpStatus kamrfp_solution_loss(const struct KamrfpSolution *sol, char **out);

// Flow on real arc `arc` (1-based).
//
// # Safety
// `sol` must be a live handle and `out` writable.
enum KamrfpStatus kamrfp_solution_flow_value(const struct KamrfpSolution *sol,
                                             size_t arc,
                                             char **out);

// Whether the exhaustive attacker confirmed `theta`.
//
// # Safety
// `sol` must be null or a live handle.
bool kamrfp_solution_certified(const struct KamrfpSolution *sol);

// Copies up to `capacity` arc ids of the worst attack into `buf` and returns
// the full length. The attack is empty when certification was skipped.
//
// # Safety
// `sol` must be null or a live handle; `buf` must hold `capacity` entries.
size_t kamrfp_solution_worst_attack(const struct KamrfpSolution *sol, size_t *buf, size_t capacity);

// Full solve report in the JSON layout of the command-line tool.
//
// # Safety
// `sol` must be a live handle and `out` writable.
enum KamrfpStatus kamrfp_solution_to_json(const struct KamrfpSolution *sol, char **out);

// Runs the exhaustive attacker on a flow given as `f <arc> <value>` lines
// and writes the JSON attack report.
//
// # Safety
// `net` must be a live handle, `flow_text` a valid C string, `out` writable.
enum KamrfpStatus kamrfp_attack(const struct KamrfpNetwork *net,
                                const char *flow_text,
                                size_t k,
                                uint64_t budget,
                                char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KAMRFP_H */
