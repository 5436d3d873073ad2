#ifndef BANDALLOC_H
#define BANDALLOC_H

/* Generated with cbindgen:0.29.4 */

/* Generated by cbindgen from bandalloc-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum BandallocStatus {
  BANDALLOC_STATUS_OK = 0,
  // A required pointer argument was null.
  BANDALLOC_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  BANDALLOC_STATUS_INVALID_UTF8 = 2,
  // Scenario text could not be parsed.
  BANDALLOC_STATUS_PARSE_ERROR = 3,
  // A parameter violates its domain constraints.
  BANDALLOC_STATUS_INVALID_PARAMETER = 4,
  // The configuration admits an unbounded traffic class.
  BANDALLOC_STATUS_UNBOUNDED_STATE_SPACE = 5,
  // The iterative solver hit its sweep limit before settling; outputs
  // are still written and usable as approximations.
  BANDALLOC_STATUS_NOT_CONVERGED = 6,
  // The balance system was singular (internal invariant violation).
  BANDALLOC_STATUS_SINGULAR_SYSTEM = 7,
  // An index argument was out of range.
  BANDALLOC_STATUS_OUT_OF_RANGE = 8,
  // Unexpected internal failure.
  BANDALLOC_STATUS_INTERNAL = 9,
} BandallocStatus;

// Scheme selector mirroring the library's variants.
typedef enum BandallocScheme {
  BANDALLOC_SCHEME_PROPOSED = 0,
  BANDALLOC_SCHEME_OVERLAY = 1,
  BANDALLOC_SCHEME_UNDERLAY = 2,
} BandallocScheme;

// Opaque model handle: parameters, scheme, and the enumerated state space.
typedef struct BandallocModel BandallocModel;

// Scenario parameters; field meanings match the scenario-file keys.
typedef struct BandallocParams {
  double lambda_total;
  double rho;
  double lambda_wifi;
  double mu;
  double r_l_dd;
  double r_up_cc;
  double r_dw_cc;
  double r_u_dd;
  double r_u_wf;
  double cap_dd;
  double cap_up;
  double cap_dw;
  double cap_u;
  double theta_u;
  double theta_l;
} BandallocParams;

// One chain state: in-service packet counts per class.
typedef struct BandallocState {
  uint32_t i;
  uint32_t j;
  uint32_t m;
  uint32_t n;
} BandallocState;

// Blocking triple plus solve diagnostics.
typedef struct BandallocBlocking {
  double p_block_d2d;
  double p_block_cc;
  double p_block_wifi;
  // Maximum absolute global-balance violation of the solution.
  double residual;
  // Sweeps performed (zero for the direct solver).
  uint64_t iterations;
  bool converged;
} BandallocBlocking;

// Aggregated simulation statistics.
typedef struct BandallocSimStats {
  uint64_t d2d_offered;
  uint64_t d2d_blocked;
  double d2d_estimate;
  double d2d_half_width;
  uint64_t cc_offered;
  uint64_t cc_blocked;
  double cc_estimate;
  double cc_half_width;
  uint64_t wifi_offered;
  uint64_t wifi_blocked;
  double wifi_estimate;
  double wifi_half_width;
  // Time-weighted mean occupancy per dimension `(i, j, m, n)`.
  double mean_occupancy[4];
} BandallocSimStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Fills `out` with the bundled default scenario parameters.
//
// # Safety
// `out` must point to writable memory for one `BandallocParams`.
enum BandallocStatus bandalloc_default_params(struct BandallocParams *out);

// Builds a model from explicit parameters, enumerating its state space.
// On success `*out` owns the model; release it with [`bandalloc_model_free`].
//
// # Safety
// `params` must point to a valid `BandallocParams`; `out` must point to
// writable memory for one pointer.
enum BandallocStatus bandalloc_model_new(const struct BandallocParams *params,
                                         enum BandallocScheme scheme,
                                         struct BandallocModel **out);

// Builds a model from scenario text (the `key = value` format of the CLI's
// scenario files). The scenario's scheme is honored; its run settings are
// not carried along — solver and simulator knobs are per-call arguments.
//
// # Safety
// `text` must be a valid NUL-terminated string; `out` as in
// [`bandalloc_model_new`].
enum BandallocStatus bandalloc_model_from_scenario(const char *text, struct BandallocModel **out);

// Releases a model created by the constructors. Null is a no-op.
//
// # Safety
// `model` must be null or a pointer previously returned by a constructor
// and not yet freed.
void bandalloc_model_free(struct BandallocModel *model);

// Number of states in the model's reachable state space.
//
// # Safety
// `model` must be a live model pointer; `out` must be writable.
enum BandallocStatus bandalloc_model_state_count(const struct BandallocModel *model,
                                                 uintptr_t *out);

// The state at `index` in lexicographic order.
//
// # Safety
// `model` must be a live model pointer; `out` must be writable.
enum BandallocStatus bandalloc_model_state_at(const struct BandallocModel *model,
                                              uintptr_t index,
                                              struct BandallocState *out);

// Solves the stationary distribution directly and writes the blocking
// triple.
//
// # Safety
// `model` must be a live model pointer; `out` must be writable.
enum BandallocStatus bandalloc_solve_exact(const struct BandallocModel *model,
                                           struct BandallocBlocking *out);

// Solves the stationary distribution by the fixed-point iteration. When the
// sweep limit is reached first, the outputs are still written and the call
// returns [`BandallocStatus::NotConverged`].
//
// # Safety
// `model` must be a live model pointer; `out` must be writable.
enum BandallocStatus bandalloc_solve_iterative(const struct BandallocModel *model,
                                               double alpha,
                                               uint64_t max_iter,
                                               struct BandallocBlocking *out);

// Runs the discrete-event simulator on the model's parameters and scheme.
// Deterministic for a fixed seed.
//
// # Safety
// `model` must be a live model pointer; `out` must be writable.
enum BandallocStatus bandalloc_simulate(const struct BandallocModel *model,
                                        uint64_t seed,
                                        double horizon,
                                        double warmup,
                                        uint32_t replications,
                                        struct BandallocSimStats *out);

// Returns the latest error message on this thread as a newly allocated
// string, or null when no error has occurred. Free it with
// [`bandalloc_string_free`].
char *bandalloc_last_error_message(void);

// Frees a string returned by this library. Null is a no-op.
//
// # Safety
// `s` must be null or a pointer obtained from
// [`bandalloc_last_error_message`], not yet freed.
void bandalloc_string_free(char *s);

// Library version as a static string; do not free.
const char *bandalloc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BANDALLOC_H */
