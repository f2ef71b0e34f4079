#ifndef ITS_CAPI_H
#define ITS_CAPI_H

/* Generated from the its-capi crate by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a C ABI call.
 */
typedef enum ItsStatus {
  /**
   * The call succeeded; searches found what they looked for.
   */
  ITS_STATUS_OK = 0,
  /**
   * The answer is a verified "no": nothing exists, a candidate failed
   * verification, or a randomized solver gave up within its budget.
   */
  ITS_STATUS_ABSENT = 1,
  /**
   * Malformed input: null pointer, bad UTF-8, bad JSON, bad parameters.
   */
  ITS_STATUS_INVALID = 2,
  /**
   * An exact search exhausted its node budget before reaching an answer.
   */
  ITS_STATUS_BUDGET_EXCEEDED = 3,
  /**
   * A panic was caught at the boundary; details via its_last_error.
   */
  ITS_STATUS_INTERNAL = 4,
} ItsStatus;

/**
 * Opaque parsed instance: a block-partitioned graph plus its optional
 * default picks-per-block.
 */
typedef struct ItsGraph ItsGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the library as a static NUL-terminated string; do not free.
 */
const char *its_version(void);

/**
 * Message describing the most recent failure on this thread, or null.
 * The pointer stays valid until the next call into the library from the
 * same thread; do not free it.
 */
const char *its_last_error(void);

/**
 * Releases a string returned through a `char **` output.
 *
 * # Safety
 * `s` must be null or a pointer previously returned by this library.
 */
void its_string_free(char *s);

/**
 * Releases a graph handle.
 *
 * # Safety
 * `g` must be null or a handle previously returned by this library.
 */
void its_graph_free(struct ItsGraph *g);

/**
 * Parses an instance document (`blocks`, `edges`, optional `s`).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid location.
 */
enum ItsStatus its_graph_parse(const char *json, struct ItsGraph **out);

/**
 * Builds an instance from a generator description, e.g.
 * `{"kind":"label_cliques","s":2,"d":2}` or
 * `{"kind":"random","r":4,"n":8,"avg_target":"2","local_cap":1,"seed":7}`.
 *
 * # Safety
 * `spec_json` must be a NUL-terminated string and `out` a valid location.
 */
enum ItsStatus its_graph_generate(const char *spec_json, struct ItsGraph **out);

/**
 * Serializes the instance in canonical form (stable byte-for-byte).
 *
 * # Safety
 * `g` must be a live handle and `out` a valid location.
 */
enum ItsStatus its_graph_to_json(const struct ItsGraph *g, char **out);

/**
 * Reports block count, thickness, maximum/local degree and per-block
 * average degrees as JSON.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid location.
 */
enum ItsStatus its_graph_profile(const struct ItsGraph *g, char **out);

/**
 * Builds the complement within each block pair (blocks stay independent).
 *
 * # Safety
 * `g` must be a live handle and `out` a valid location.
 */
enum ItsStatus its_graph_complement(const struct ItsGraph *g, struct ItsGraph **out);

/**
 * Builds the auxiliary graph whose vertices are all s-subsets of each
 * block; its 1-transversals correspond to the input's s-transversals.
 * `cap` bounds the auxiliary vertex count (0 means 1,000,000).
 *
 * # Safety
 * `g` must be a live handle and `out` a valid location.
 */
enum ItsStatus its_graph_reduce_blowup(const struct ItsGraph *g,
                                       size_t s,
                                       size_t cap,
                                       struct ItsGraph **out);

/**
 * Builds the auxiliary graph contracting each run of s consecutive
 * vertices per block to one vertex.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid location.
 */
enum ItsStatus its_graph_reduce_quotient(const struct ItsGraph *g, size_t s, struct ItsGraph **out);

/**
 * Exhaustive search for an independent transversal of s-sets. On success
 * writes the candidate JSON; returns `Absent` when provably none exists.
 * `budget` caps search nodes (0 means 100,000,000).
 *
 * # Safety
 * `g` must be a live handle and `out_candidate` a valid location.
 */
enum ItsStatus its_find(const struct ItsGraph *g, size_t s, uint64_t budget, char **out_candidate);

/**
 * Counts independent transversals of s-sets exactly and reports the
 * guaranteed lower bound at thickness `t` (0 means the instance's own
 * thickness). `budget` caps search nodes (0 means 100,000,000).
 *
 * # Safety
 * `g` must be a live handle and `out_report` a valid location.
 */
enum ItsStatus its_count(const struct ItsGraph *g,
                         size_t s,
                         size_t t,
                         uint64_t budget,
                         char **out_report);

/**
 * Checks a candidate selection against the instance. Writes a JSON
 * report with `ok` and `violations`; returns `Ok` only when it passes.
 *
 * # Safety
 * `g` must be a live handle, `candidate_json` a NUL-terminated string,
 * and `out_report` a valid location.
 */
enum ItsStatus its_verify(const struct ItsGraph *g, const char *candidate_json, char **out_report);

/**
 * Randomized prune-and-resample solver. `options_json` may be null or an
 * object with `seed`, `max_resamples`, `prune_to`. On success writes the
 * verified candidate; `out_stats` (optional) receives run statistics.
 * Returns `Absent` when the resample budget runs out.
 *
 * # Safety
 * `g` must be a live handle; `options_json` null or NUL-terminated;
 * `out_candidate` valid; `out_stats` null or valid.
 */
enum ItsStatus its_solve_lll(const struct ItsGraph *g,
                             size_t s,
                             const char *options_json,
                             char **out_candidate,
                             char **out_stats);

/**
 * Round-based randomized solver. `options_json` may be null or an object
 * with `eps`, `p`, `degree_bound` (rationals as strings), `rounds`,
 * `max_round_retries`, `seed`, `artificial_deletion`, `early_handoff`,
 * `terminal_max_resamples`. On success writes the verified candidate;
 * `out_stats` (optional) receives a run summary including round records.
 * Returns `Absent` when the solver gives up.
 *
 * # Safety
 * `g` must be a live handle; `options_json` null or NUL-terminated;
 * `out_candidate` valid; `out_stats` null or valid.
 */
enum ItsStatus its_solve_nibble(const struct ItsGraph *g,
                                size_t s,
                                const char *options_json,
                                char **out_candidate,
                                char **out_stats);

/**
 * Splits every block into |V_i|/s disjoint independent transversals of
 * s-sets. Writes a JSON report with `found`, `members` and hypothesis
 * flags; returns `Absent` when the augmentation gets stuck.
 *
 * # Safety
 * `g` must be a live handle and `out_report` a valid location.
 */
enum ItsStatus its_factor(const struct ItsGraph *g, size_t s, uint64_t budget, char **out_report);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ITS_CAPI_H */
