#ifndef CREDAL_BAYES_H
#define CREDAL_BAYES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CbStatus {
  CB_STATUS_OK = 0,
  CB_STATUS_NULL_POINTER = 1,
  CB_STATUS_INVALID_UTF8 = 2,
  CB_STATUS_INVALID_INPUT = 3,
  CB_STATUS_UNDEFINED_RATIO = 4,
  CB_STATUS_NOT_TWO_ALTERNATING = 5,
  CB_STATUS_TOO_LARGE = 6,
  CB_STATUS_EMPTY_CORE = 7,
  CB_STATUS_ZERO_EVIDENCE = 8,
  CB_STATUS_NOT_ATTAINED = 9,
  CB_STATUS_INTERNAL = 10,
  CB_STATUS_PANIC = 11,
} CbStatus;

typedef enum CbRoute {
  CB_ROUTE_VERTEX = 0,
  CB_ROUTE_CHOQUET = 1,
} CbRoute;

/*
 Opaque prior capacity.
 */
typedef struct CbCapacity CbCapacity;

/*
 Opaque likelihood band. Values are kept raw and placed on the prior's
 outcome space when the two are combined.
 */
typedef struct CbLikelihood CbLikelihood;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread, or an empty string.
 The pointer stays valid until the next call into this library on the
 same thread.
 */
const char *cb_last_error_message(void);

/*
 Parses a capacity from its JSON form (`outcomes` is required).

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CbStatus cb_capacity_from_json(const char *json, struct CbCapacity **out);

/*
 (1 - eps) p(A) + eps on nonempty events, over outcomes labelled t1..tn.

 # Safety
 `p` must point to `n` doubles; `out` must be writable.
 */
enum CbStatus cb_capacity_eps_contamination(const double *p,
                                            uintptr_t n,
                                            double eps,
                                            struct CbCapacity **out);

/*
 Number of outcomes, or 0 for a null handle.

 # Safety
 `c` must be null or a live handle.
 */
uintptr_t cb_capacity_num_outcomes(const struct CbCapacity *c);

/*
 # Safety
 `c` must be a live handle; `out` must be writable.
 */
enum CbStatus cb_capacity_value(const struct CbCapacity *c, uint32_t event, double *out);

/*
 # Safety
 `c` must be a live handle; `out` must be writable.
 */
enum CbStatus cb_capacity_is_two_alternating(const struct CbCapacity *c, bool *out);

/*
 Explicit JSON form; release the string with [`cb_string_free`].

 # Safety
 `c` must be a live handle; `out` must be writable.
 */
enum CbStatus cb_capacity_to_json(const struct CbCapacity *c, char **out);

/*
 # Safety
 `c` must be null or a handle from this library, not yet freed.
 */
void cb_capacity_free(struct CbCapacity *c);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void cb_string_free(char *s);

/*
 Likelihood band [lower, upper] over n outcomes.

 # Safety
 `lower` and `upper` must point to `n` doubles; `out` must be writable.
 */
enum CbStatus cb_likelihood_band(const double *lower,
                                 const double *upper,
                                 uintptr_t n,
                                 struct CbLikelihood **out);

/*
 # Safety
 `l` must be null or a handle from this library, not yet freed.
 */
void cb_likelihood_free(struct CbLikelihood *l);

/*
 Vertex-route upper bound on the posterior upper probability of `event`.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum CbStatus cb_upper_bound_vertex(const struct CbCapacity *prior,
                                    const struct CbLikelihood *likelihood,
                                    uint32_t event,
                                    double *out);

/*
 Choquet-route upper bound on the posterior upper probability of `event`.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum CbStatus cb_upper_bound_choquet(const struct CbCapacity *prior,
                                     const struct CbLikelihood *likelihood,
                                     uint32_t event,
                                     double *out);

/*
 1 - upper bound of the complement.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum CbStatus cb_lower_bound(const struct CbCapacity *prior,
                             const struct CbLikelihood *likelihood,
                             uint32_t event,
                             enum CbRoute route,
                             double *out);

/*
 Posterior upper probability of every event as a new capacity. Requires a
 2-alternating prior.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum CbStatus cb_posterior_capacity(const struct CbCapacity *prior,
                                    const struct CbLikelihood *likelihood,
                                    struct CbCapacity **out);

/*
 Brute-force posterior upper probability over core vertices and all
 bang-bang likelihoods (at most 10 outcomes).

 # Safety
 Handles must be live; `out` must be writable.
 */
enum CbStatus cb_oracle_upper(const struct CbCapacity *prior,
                              const struct CbLikelihood *likelihood,
                              uint32_t event,
                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CREDAL_BAYES_H */
