#ifndef QAFLOW_H
#define QAFLOW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QaflowStatus {
  QAFLOW_STATUS_OK = 0,
  QAFLOW_STATUS_NULL_POINTER = 1,
  QAFLOW_STATUS_INVALID_ARGUMENT = 2,
  QAFLOW_STATUS_INVARIANT_VIOLATION = 3,
  QAFLOW_STATUS_PANIC = 4,
} QaflowStatus;

/**
 * A finished run and its serialized trace.
 */
typedef struct QaflowRun QaflowRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qaflow_version(void);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *qaflow_last_error_message(void);

/**
 * Deutsch-Jozsa on the `2^n` single-bit outputs `f(0), …, f(2^n − 1)`.
 *
 * # Safety
 * `outputs` must point to `2^n` readable bytes; `out` must be writable.
 */
enum QaflowStatus qaflow_run_deutsch_jozsa(const uint8_t *outputs,
                                           size_t n,
                                           struct QaflowRun **out);

/**
 * Period finding on the `2^n` outputs of an `n → n` function.
 *
 * # Safety
 * `outputs` must point to `2^n` readable values; `out` must be writable.
 */
enum QaflowStatus qaflow_run_shor(const uint32_t *outputs, size_t n, struct QaflowRun **out);

/**
 * Grover search for item `marked` with exactly `iterations` iterations.
 *
 * # Safety
 * `out` must be writable.
 */
enum QaflowStatus qaflow_run_grover(size_t n,
                                    uint64_t marked,
                                    size_t iterations,
                                    struct QaflowRun **out);

/**
 * Minimum-entropy termination scan; `max_iterations == 0` uses the default horizon.
 *
 * # Safety
 * `out` must be writable.
 */
enum QaflowStatus qaflow_scan_grover(size_t n,
                                     uint64_t marked,
                                     size_t max_iterations,
                                     struct QaflowRun **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `run` must come from this library and not be used afterwards.
 */
void qaflow_run_free(struct QaflowRun *run);

/**
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum QaflowStatus qaflow_run_stop_iteration(const struct QaflowRun *run, size_t *out);

/**
 * Number of recorded steps across all iterations.
 *
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum QaflowStatus qaflow_run_step_count(const struct QaflowRun *run, size_t *out);

/**
 * Analysis-subset Shannon and von Neumann entropy (bits) and intelligence of step `index`.
 *
 * # Safety
 * `run` must be a live handle; the three outputs must be writable.
 */
enum QaflowStatus qaflow_run_step_values(const struct QaflowRun *run,
                                         size_t index,
                                         double *shannon,
                                         double *von_neumann,
                                         double *intelligence);

/**
 * Chosen outcome bit string, or null for a null handle.
 *
 * # Safety
 * `run` must be a live handle or null.
 */
const char *qaflow_run_outcome(const struct QaflowRun *run);

/**
 * Verdict text such as `balanced`, `period:2` or `marked:001`.
 *
 * # Safety
 * `run` must be a live handle or null.
 */
const char *qaflow_run_verdict(const struct QaflowRun *run);

/**
 * The full trace document as JSON.
 *
 * # Safety
 * `run` must be a live handle or null.
 */
const char *qaflow_run_trace_json(const struct QaflowRun *run);

/**
 * Shannon entropy in bits.
 *
 * # Safety
 * `p` must point to `len` values; `out` must be writable.
 */
enum QaflowStatus qaflow_shannon(const double *p, size_t len, double *out);

/**
 * Renyi entropy of order `q` in nats.
 *
 * # Safety
 * `p` must point to `len` values; `out` must be writable.
 */
enum QaflowStatus qaflow_renyi(const double *p, size_t len, double q, double *out);

/**
 * Tsallis entropy of order `q`.
 *
 * # Safety
 * `p` must point to `len` values; `out` must be writable.
 */
enum QaflowStatus qaflow_tsallis(const double *p, size_t len, double q, double *out);

/**
 * Relative entropy D(p‖q) in nats; infinity when p is not supported by q.
 *
 * # Safety
 * `p` and `q` must each point to `len` values; `out` must be writable.
 */
enum QaflowStatus qaflow_relative_entropy(const double *p,
                                          const double *q,
                                          size_t len,
                                          double *out);

/**
 * Von Neumann entropy (bits) of a density matrix given row-major as
 * interleaved `re, im` pairs (`2·order²` values).
 *
 * # Safety
 * `re_im` must point to `2·order²` values; `out` must be writable.
 */
enum QaflowStatus qaflow_von_neumann(const double *re_im, size_t order, double *out);

/**
 * Oracle-call lower bound for unstructured search over `big_n` items.
 *
 * # Safety
 * `out` must be writable.
 */
enum QaflowStatus qaflow_grover_lower_bound(size_t big_n, double p_error, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QAFLOW_H */
