/* C interface to the flux threshold and classification routines. */

#pragma once

/* Generated by cbindgen from the flux-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call in this interface.
 */
typedef enum FluxStatus {
  /**
   * The call succeeded and its out-parameters are valid.
   */
  FLUX_STATUS_OK = 0,
  /**
   * A required pointer argument was null; nothing was written.
   */
  FLUX_STATUS_NULL_POINTER = 1,
  /**
   * A parameter violated its documented range or relationship.
   */
  FLUX_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The requested threshold has no finite value; the out slot holds
   * positive infinity.
   */
  FLUX_STATUS_INFINITE_THRESHOLD = 3,
} FluxStatus;

/**
 * The optimal-play regimes of the single-player game, mirrored as plain
 * C enum values. `MixedLieFirst` carries its round count through the
 * separate `lie_rounds` out-parameter of [`flux_classify_strategy`].
 */
typedef enum FluxStrategyClass {
  FLUX_STRATEGY_CLASS_LYING_TILL_END = 0,
  FLUX_STRATEGY_CLASS_LYING_TILL_BUSTED_PLUS_LIE_LAST_ROUND = 1,
  FLUX_STRATEGY_CLASS_LYING_TILL_BUSTED = 2,
  FLUX_STRATEGY_CLASS_HONEST_TILL_END = 3,
  FLUX_STRATEGY_CLASS_MIXED_LIE_FIRST = 4,
} FluxStrategyClass;

/**
 * Opaque signal-model handle. Create with one of the
 * `flux_signal_model_*` constructors, release with
 * [`flux_signal_model_free`].
 */
typedef struct FluxSignalModel FluxSignalModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a two-point signal model: consumption `d` with probability `p`,
 * zero otherwise.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum FluxStatus flux_signal_model_bernoulli(double p, double d, struct FluxSignalModel **out);

/**
 * Creates a uniform signal model on `[0, d]`.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum FluxStatus flux_signal_model_uniform(double d, struct FluxSignalModel **out);

/**
 * Creates an empirical signal model from `len` parallel `(value, weight)`
 * entries; weights must sum to one and values must lie in `[0, d]`.
 *
 * # Safety
 * `values` and `weights` must be null or valid for reading `len` doubles;
 * `out` must be null or valid for writing one pointer.
 */
enum FluxStatus flux_signal_model_empirical(const double *values,
                                            const double *weights,
                                            uintptr_t len,
                                            double d,
                                            struct FluxSignalModel **out);

/**
 * Releases a model created by the constructors above. Null is a no-op.
 *
 * # Safety
 * `model` must be null or a pointer returned by a `flux_signal_model_*`
 * constructor that has not already been freed.
 */
void flux_signal_model_free(struct FluxSignalModel *model);

/**
 * Probability that a signal reaches `alpha` times the model's consumption,
 * i.e. the chance a report below that bar is caught.
 *
 * # Safety
 * `model` must be a live handle or null; `out` must be null or valid for
 * writing one double.
 */
enum FluxStatus flux_busted_probability(const struct FluxSignalModel *model,
                                        double alpha,
                                        double *out);

/**
 * Minimum penalty rate making honest reporting optimal from the first of
 * `t_rounds` rounds against a two-point signal with busted probability `p`.
 *
 * # Safety
 * `out` must be null or valid for writing one double.
 */
enum FluxStatus flux_truthful_threshold(uint32_t t_rounds, double p, double *out);

/**
 * Minimum penalty rate making it optimal to keep a full report alive with
 * `rounds_left` rounds remaining.
 *
 * # Safety
 * `out` must be null or valid for writing one double.
 */
enum FluxStatus flux_history_threshold(uint32_t rounds_left, double p, double *out);

/**
 * Penalty rate under which every report stays at or above `alpha` times
 * consumption, for an arbitrary signal model. Writes infinity and returns
 * `FLUX_STATUS_INFINITE_THRESHOLD` when no finite rate suffices.
 *
 * # Safety
 * `model` must be a live handle or null; `out` must be null or valid for
 * writing one double.
 */
enum FluxStatus flux_alpha_threshold(const struct FluxSignalModel *model,
                                     uint32_t t_rounds,
                                     double alpha,
                                     double *out);

/**
 * Closed form of [`flux_alpha_threshold`] for the uniform model.
 *
 * # Safety
 * `out` must be null or valid for writing one double.
 */
enum FluxStatus flux_uniform_alpha_threshold(uint32_t t_rounds, double alpha, double *out);

/**
 * Minimum penalty rate making all-truthful a Nash equilibrium of the
 * `n`-player cost-sharing game with overhead `c` and consumption `d`.
 *
 * # Safety
 * `out` must be null or valid for writing one double.
 */
enum FluxStatus flux_ne_threshold(uint32_t t_rounds,
                                  double p,
                                  uint32_t n,
                                  double c,
                                  double d,
                                  double *out);

/**
 * Minimum penalty rate making all-truthful a dominant-strategy equilibrium
 * of the `n`-player cost-sharing game.
 *
 * # Safety
 * `out` must be null or valid for writing one double.
 */
enum FluxStatus flux_dse_threshold(uint32_t t_rounds,
                                   double p,
                                   uint32_t n,
                                   double c,
                                   double d,
                                   double *out);

/**
 * Optimal single-player strategy class at rate `r`. When the class is
 * `FLUX_STRATEGY_CLASS_MIXED_LIE_FIRST`, `lie_rounds` receives the number
 * of leading rounds spent lying; otherwise it receives zero.
 *
 * # Safety
 * `class_out` and `lie_rounds_out` must each be null or valid for one
 * write.
 */
enum FluxStatus flux_classify_strategy(uint32_t t_rounds,
                                       double p,
                                       double r,
                                       enum FluxStrategyClass *class_out,
                                       uint32_t *lie_rounds_out);

/**
 * Scales a rate that is sufficient at consumption `d_min` up to one that
 * stays sufficient when per-round consumption varies within
 * `[d_min, d_max]`.
 *
 * # Safety
 * `out` must be null or valid for writing one double.
 */
enum FluxStatus flux_range_robust_scale(double rate, double d_min, double d_max, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus
