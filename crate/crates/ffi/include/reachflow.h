#ifndef REACHFLOW_H
#define REACHFLOW_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RfStatus {
  RF_STATUS_OK = 0,
  RF_STATUS_NULL_POINTER = 1,
  RF_STATUS_INVALID_UTF8 = 2,
  RF_STATUS_BUFFER_TOO_SMALL = 3,
  RF_STATUS_PANIC = 4,
  RF_STATUS_DIMENSION_MISMATCH = 10,
  RF_STATUS_OUTSIDE_REACH_TUBE = 11,
  RF_STATUS_AMBIGUOUS_PROJECTION = 12,
  RF_STATUS_NOT_ON_DOMAIN = 13,
  RF_STATUS_INVALID_RESOLUTION = 14,
  RF_STATUS_INVALID_DOMAIN = 15,
  RF_STATUS_INVALID_POTENTIAL = 16,
  RF_STATUS_INVALID_POINT = 17,
  RF_STATUS_NON_FINITE_STATE = 18,
  RF_STATUS_LINESEARCH_FAILED = 19,
  RF_STATUS_EMPTY_SAMPLE = 20,
  RF_STATUS_SIZE_MISMATCH = 21,
  RF_STATUS_SIZE_TOO_LARGE = 22,
  RF_STATUS_INVALID_SWEEP = 23,
  RF_STATUS_UNKNOWN_FIGURE = 24,
  RF_STATUS_INVALID_CONFIG = 25,
  RF_STATUS_IO = 26,
  RF_STATUS_PARSE = 27,
} RfStatus;

/**
 * How a simulation run ended.
 */
typedef enum RfTermination {
  RF_TERMINATION_NOT_RUN = 0,
  RF_TERMINATION_CONVERGED = 1,
  RF_TERMINATION_MAX_STEPS = 2,
  RF_TERMINATION_FIXED_TIME_REACHED = 3,
  RF_TERMINATION_FAILED = 4,
} RfTermination;

typedef struct RfDomain RfDomain;

typedef struct RfPotential RfPotential;

/**
 * A scenario together with its initial state and, after a run, its trace.
 */
typedef struct RfSimulation RfSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread. Valid until the next failing
 * call on the same thread; never null.
 */
const char *rf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rf_version(void);

/**
 * Builds a domain from its JSON description, e.g.
 * `{"kind": "disc", "center": [0, 0], "radius": 1}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out_domain` writable.
 */
enum RfStatus rf_domain_from_json(const char *json, struct RfDomain **out_domain);

/**
 * # Safety
 * `domain` must come from [`rf_domain_from_json`] and not be used afterwards.
 */
void rf_domain_free(struct RfDomain *domain);

/**
 * # Safety
 * `domain` must be a live handle; `out_dim` writable.
 */
enum RfStatus rf_domain_dim(const struct RfDomain *domain, size_t *out_dim);

/**
 * Declared reach; `INFINITY` for convex domains.
 *
 * # Safety
 * `domain` must be a live handle; `out_reach` writable.
 */
enum RfStatus rf_domain_reach(const struct RfDomain *domain, double *out_reach);

/**
 * # Safety
 * `x` must hold `dim` doubles; `out_distance` writable.
 */
enum RfStatus rf_domain_distance(const struct RfDomain *domain,
                                 const double *x,
                                 size_t dim,
                                 double *out_distance);

/**
 * Closest point within the reach tube; fails with `OutsideReachTube` or
 * `AmbiguousProjection` otherwise.
 *
 * # Safety
 * `x` must hold `dim` doubles and `out_point` room for `dim` doubles.
 */
enum RfStatus rf_domain_project(const struct RfDomain *domain,
                                const double *x,
                                size_t dim,
                                double *out_point);

/**
 * Builds a potential from JSON, e.g. `{"kind": "quadratic"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out_potential` writable.
 */
enum RfStatus rf_potential_from_json(const char *json, struct RfPotential **out_potential);

/**
 * # Safety
 * `potential` must come from [`rf_potential_from_json`] and not be used afterwards.
 */
void rf_potential_free(struct RfPotential *potential);

/**
 * # Safety
 * `x` must hold `dim` doubles; `out_value` writable.
 */
enum RfStatus rf_potential_eval(const struct RfPotential *potential,
                                const double *x,
                                size_t dim,
                                double *out_value);

/**
 * # Safety
 * `x` must hold `dim` doubles and `out_grad` room for `dim` doubles.
 */
enum RfStatus rf_potential_grad(const struct RfPotential *potential,
                                const double *x,
                                size_t dim,
                                double *out_grad);

/**
 * Loads a scenario (the same JSON the command-line tool reads) and draws
 * its initial state.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out_sim` writable.
 */
enum RfStatus rf_simulation_from_json(const char *json, struct RfSimulation **out_sim);

/**
 * # Safety
 * `sim` must come from [`rf_simulation_from_json`] and not be used afterwards.
 */
void rf_simulation_free(struct RfSimulation *sim);

/**
 * Runs the scenario from its initial state, replacing any earlier result.
 * A run that stops on a step error still returns `Ok`; the termination
 * reports `Failed` and the state is the last good one.
 *
 * # Safety
 * `sim` must be a live handle; `out_termination` may be null.
 */
enum RfStatus rf_simulation_run(struct RfSimulation *sim, enum RfTermination *out_termination);

/**
 * Particle count and spatial dimension.
 *
 * # Safety
 * `sim` must be a live handle; both outputs writable.
 */
enum RfStatus rf_simulation_shape(const struct RfSimulation *sim, size_t *out_n, size_t *out_dim);

/**
 * Copies the current positions (final state after a run, initial state
 * before) into `out_coords`, which must hold `n * dim` doubles.
 *
 * # Safety
 * `out_coords` must point to `capacity` writable doubles.
 */
enum RfStatus rf_simulation_positions(const struct RfSimulation *sim,
                                      double *out_coords,
                                      size_t capacity);

/**
 * Last trace record of the most recent run: step count, time, energy and
 * gradient norm. Fails with `InvalidConfig` before the first run.
 *
 * # Safety
 * `sim` must be a live handle; every output writable.
 */
enum RfStatus rf_simulation_summary(const struct RfSimulation *sim,
                                    size_t *out_steps,
                                    double *out_time,
                                    double *out_energy,
                                    double *out_grad_norm);

/**
 * Quadratic Wasserstein distance between two uniform measures of `n`
 * points each.
 *
 * # Safety
 * `a` and `b` must each hold `n * dim` doubles; `out_distance` writable.
 */
enum RfStatus rf_w2(const double *a, const double *b, size_t n, size_t dim, double *out_distance);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REACHFLOW_H */
