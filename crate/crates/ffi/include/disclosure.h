#ifndef DISCLOSURE_H
#define DISCLOSURE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DsStatus {
  DS_STATUS_OK = 0,
  DS_STATUS_NULL_POINTER = 1,
  DS_STATUS_NO_INTERIOR_ROOT = 2,
  DS_STATUS_DOMAIN_ERROR = 3,
  DS_STATUS_CONCAVITY_VIOLATION = 4,
  DS_STATUS_MISSING_DERIVATIVES = 5,
  DS_STATUS_INVALID_PARAMS = 6,
  DS_STATUS_INVALID_POSTERIOR = 7,
  DS_STATUS_INVALID_GRID = 8,
  DS_STATUS_INVALID_ARGUMENT = 9,
  DS_STATUS_NOT_LINEAR_RECEIVER = 10,
  DS_STATUS_MONOTONICITY_VIOLATION = 11,
  DS_STATUS_NO_OPPOSING_STATES = 12,
  DS_STATUS_INFEASIBLE_WEIGHTS = 13,
  DS_STATUS_DEGENERATE_SIMPLEX = 14,
  DS_STATUS_UNSUPPORTED_SUPPORT_SIZE = 15,
  DS_STATUS_SOLVER_ERROR = 16,
  DS_STATUS_CONFIG_ERROR = 17,
  DS_STATUS_IO_ERROR = 18,
  DS_STATUS_PANIC = 19,
} DsStatus;

typedef enum DsVerdict {
  DS_VERDICT_HOLDS_STRICTLY = 0,
  DS_VERDICT_HOLDS_WEAKLY = 1,
  DS_VERDICT_VIOLATED = 2,
  DS_VERDICT_VACUOUS = 3,
} DsVerdict;

typedef enum DsEnvelopeVerdict {
  DS_ENVELOPE_VERDICT_FULL_DISCLOSURE_OPTIMAL = 0,
  DS_ENVELOPE_VERDICT_FULL_DISCLOSURE_SUBOPTIMAL = 1,
} DsEnvelopeVerdict;

typedef enum DsRegime {
  DS_REGIME_OPTIMAL = 0,
  DS_REGIME_SUBOPTIMAL = 1,
  DS_REGIME_INCONCLUSIVE = 2,
} DsRegime;

/**
 * Opaque model handle.
 */
typedef struct DsModel DsModel;

/**
 * Grid verdict of a pairwise condition.
 */
typedef struct DsConditionResult {
  enum DsVerdict verdict;
  double min_margin;
  double margin_tol;
  uint64_t pairs_tested;
} DsConditionResult;

typedef struct DsSuboptimality {
  /**
   * 1 when a witness pair was found, 0 otherwise.
   */
  uint8_t found;
  /**
   * State with the lower full-information action.
   */
  double low_state;
  double high_state;
} DsSuboptimality;

typedef struct DsBinarySplit {
  double low_state;
  double high_state;
  double p_low;
  double a_pool;
  double a_low;
  double a_high;
  double k;
  double gain;
  double effort_delta;
} DsBinarySplit;

typedef struct DsEnvelope {
  enum DsEnvelopeVerdict verdict;
  /**
   * Envelope value at the prior minus the full-disclosure value.
   */
  double margin;
  double envelope_value;
  double full_disclosure_value;
  double pooled_value;
} DsEnvelope;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ds_version(void);

/**
 * Message of the most recent failure on this thread. The pointer stays
 * valid until the next `ds_*` call on the same thread.
 */
const char *ds_last_error(void);

/**
 * CRRA effort model on the state interval `[state_lo, state_hi]`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum DsStatus ds_crra_new(double gamma,
                          double rho,
                          double delta,
                          double kappa,
                          double state_lo,
                          double state_hi,
                          struct DsModel **out);

/**
 * Quadratic-loss model with sender bias `b`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum DsStatus ds_quadratic_cs_new(double b, double state_lo, double state_hi, struct DsModel **out);

/**
 * Separable production model with `φ = h·a^κ`, `ξ = l·a^τ` and `β(ω) = ω`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum DsStatus ds_separable_power_new(double h,
                                     double kappa,
                                     double l,
                                     double tau,
                                     double delta,
                                     double state_lo,
                                     double state_hi,
                                     struct DsModel **out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must come from a `ds_*_new` constructor and not be freed twice.
 */
void ds_model_free(struct DsModel *model);

/**
 * Receiver's best response to the posterior `(support[i], probs[i])`.
 *
 * # Safety
 * `support` and `probs` must point to `n` doubles.
 */
enum DsStatus ds_best_response(const struct DsModel *model,
                               const double *support,
                               const double *probs,
                               size_t n,
                               double *out);

/**
 * Sender's expected utility at the receiver's best response.
 *
 * # Safety
 * As [`ds_best_response`].
 */
enum DsStatus ds_sender_value(const struct DsModel *model,
                              const double *support,
                              const double *probs,
                              size_t n,
                              double *out);

/**
 * `V_a / (−U_aa)` at `(state, action)`.
 *
 * # Safety
 * `model` must be a live handle; `out` valid for writes.
 */
enum DsStatus ds_ratio(const struct DsModel *model, double state, double action, double *out);

/**
 * Weak sufficient condition on an automatic `n_states x n_actions` grid.
 *
 * # Safety
 * `model` must be a live handle; `out` valid for writes.
 */
enum DsStatus ds_check_weak(const struct DsModel *model,
                            size_t n_states,
                            size_t n_actions,
                            struct DsConditionResult *out);

/**
 * Derivable condition on an automatic grid.
 *
 * # Safety
 * As [`ds_check_weak`].
 */
enum DsStatus ds_check_derivable(const struct DsModel *model,
                                 size_t n_states,
                                 size_t n_actions,
                                 struct DsConditionResult *out);

/**
 * Searches the prior support for a reversed state pair. The support states
 * are added to the grid.
 *
 * # Safety
 * `support` must point to `n` doubles.
 */
enum DsStatus ds_check_suboptimality(const struct DsModel *model,
                                     size_t n_states,
                                     size_t n_actions,
                                     const double *support,
                                     size_t n,
                                     struct DsSuboptimality *out);

/**
 * Sender's gain from revealing `state1` and `state2` instead of pooling
 * them with probability `p1` on `state1`.
 *
 * # Safety
 * `model` must be a live handle; `out` valid for writes.
 */
enum DsStatus ds_binary_split_gain(const struct DsModel *model,
                                   double state1,
                                   double state2,
                                   double p1,
                                   struct DsBinarySplit *out);

/**
 * Concavification on two states; `prior_p` is the probability of
 * `state_hi`.
 *
 * # Safety
 * `model` must be a live handle; `out` valid for writes.
 */
enum DsStatus ds_concavify_2state(const struct DsModel *model,
                                  double state_lo,
                                  double state_hi,
                                  double prior_p,
                                  size_t resolution,
                                  struct DsEnvelope *out);

/**
 * Analytic CRRA regime for `(gamma, rho)`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum DsStatus ds_crra_regime(double gamma, double rho, enum DsRegime *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DISCLOSURE_H */
