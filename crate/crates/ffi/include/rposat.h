#ifndef RPOSAT_H
#define RPOSAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RposatStatus {
  RPOSAT_STATUS_OK = 0,
  RPOSAT_STATUS_NULL_POINTER = 1,
  RPOSAT_STATUS_INVALID_ARGUMENT = 2,
  RPOSAT_STATUS_CONFIG = 3,
  RPOSAT_STATUS_IO = 4,
  RPOSAT_STATUS_DIMENSION = 5,
  RPOSAT_STATUS_INTERNAL = 6,
} RposatStatus;

typedef enum RposatAgentKind {
  RPOSAT_AGENT_KIND_RPO_SAT = 0,
  RPOSAT_AGENT_KIND_POMD_KL = 1,
  RPOSAT_AGENT_KIND_GREEDY_UCB = 2,
  RPOSAT_AGENT_KIND_FIXED_OPTIMAL = 3,
  RPOSAT_AGENT_KIND_FIXED_UNIFORM = 4,
} RposatAgentKind;

/**
 * Opaque agent handle; owns a copy of its environment.
 */
typedef struct RposatAgent RposatAgent;

/**
 * Opaque MDP handle.
 */
typedef struct RposatMdp RposatMdp;

/**
 * Ground-truth measurements of one episode, summed over steps where noted.
 */
typedef struct RposatEpisodeSummary {
  /**
   * One-based episode index.
   */
  uint64_t k;
  /**
   * Sum of realized costs.
   */
  double realized_cost;
  /**
   * `V^{π^k}_1(s_1)`.
   */
  double policy_value;
  /**
   * `V*_1(s_1)`.
   */
  double optimal_value;
  /**
   * Learner's `V^k_1(s_1)`.
   */
  double estimated_value;
  double bonus_sum;
  uint64_t optimism_violations;
  uint64_t visited_cells;
} RposatEpisodeSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next library call on the same thread.
 */
const char *rposat_last_error(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void rposat_string_free(char *s);

/**
 * RiverSwim chain with `states` states and horizon `horizon`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RposatStatus rposat_mdp_riverswim(size_t states, size_t horizon, struct RposatMdp **out);

/**
 * Random MDP whose transition rows are supported on `branching` states.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RposatStatus rposat_mdp_random(size_t states,
                                    size_t actions,
                                    size_t horizon,
                                    uint64_t seed,
                                    size_t branching,
                                    struct RposatMdp **out);

/**
 * Parses an MDP from its JSON encoding.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` a valid pointer.
 */
enum RposatStatus rposat_mdp_from_json(const char *json, struct RposatMdp **out);

/**
 * JSON encoding of `mdp`; release with [`rposat_string_free`].
 *
 * # Safety
 * `mdp` must be a live handle; `out` a valid pointer.
 */
enum RposatStatus rposat_mdp_to_json(const struct RposatMdp *mdp, char **out);

/**
 * # Safety
 * `mdp` must be a live handle; the out pointers must be valid.
 */
enum RposatStatus rposat_mdp_dims(const struct RposatMdp *mdp,
                                  size_t *states,
                                  size_t *actions,
                                  size_t *horizon);

/**
 * `V*_1` averaged over the initial distribution.
 *
 * # Safety
 * `mdp` must be a live handle; `out` a valid pointer.
 */
enum RposatStatus rposat_mdp_optimal_value(const struct RposatMdp *mdp, double *out);

/**
 * # Safety
 * `mdp` must be null or a handle not yet freed.
 */
void rposat_mdp_free(struct RposatMdp *mdp);

/**
 * Euclidean projection of `x[0..len]` onto the probability simplex, written
 * to `out[0..len]`. `x` and `out` may alias.
 *
 * # Safety
 * Both pointers must address `len` doubles.
 */
enum RposatStatus rposat_project_simplex(const double *x, size_t len, double *out);

/**
 * Creates an agent with the standard configuration for `kind`. The agent
 * keeps its own copy of `mdp`.
 *
 * # Safety
 * `mdp` must be a live handle; `out` a valid pointer.
 */
enum RposatStatus rposat_agent_new(const struct RposatMdp *mdp,
                                   enum RposatAgentKind kind,
                                   size_t episodes,
                                   double delta,
                                   double bonus_scale,
                                   uint64_t seed,
                                   struct RposatAgent **out);

/**
 * Runs one episode and reports its measurements.
 *
 * # Safety
 * `agent` must be a live handle; `out` a valid pointer.
 */
enum RposatStatus rposat_agent_step(struct RposatAgent *agent, struct RposatEpisodeSummary *out);

/**
 * `Σ_k (V^{π^k}_1 - V*_1)(s^k_1)` over the episodes run so far.
 *
 * # Safety
 * `agent` must be a live handle; `out` a valid pointer.
 */
enum RposatStatus rposat_agent_cumulative_regret(const struct RposatAgent *agent, double *out);

/**
 * Copies the current policy, laid out as `[h][s][a]`, into `out`. `len` must
 * equal `H * S * A`.
 *
 * # Safety
 * `agent` must be a live handle; `out` must address `len` doubles.
 */
enum RposatStatus rposat_agent_policy(const struct RposatAgent *agent, double *out, size_t len);

/**
 * # Safety
 * `agent` must be null or a handle not yet freed.
 */
void rposat_agent_free(struct RposatAgent *agent);

/**
 * Runs a batch described by an experiment config (JSON) and returns the
 * index document as JSON; release it with [`rposat_string_free`].
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `index_json` a valid pointer.
 */
enum RposatStatus rposat_run_batch(const char *config_json, char **index_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RPOSAT_H */
