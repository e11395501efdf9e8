#ifndef CQLAB_H
#define CQLAB_H

/* Generated by cbindgen from cqlab-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the CLI exit-code convention.
 */
typedef enum CqlabStatus {
  /**
   * Success.
   */
  CqlabStatus_Ok = 0,
  /**
   * Numerical or verification failure.
   */
  CqlabStatus_Failure = 1,
  /**
   * Invalid input (file, JSON, arguments).
   */
  CqlabStatus_InputError = 2,
  /**
   * Resource limit exceeded.
   */
  CqlabStatus_LimitExceeded = 3,
  /**
   * A required pointer argument was null.
   */
  CqlabStatus_NullPointer = 4,
} CqlabStatus;

/**
 * Opaque channel handle: the channel plus the spec file's optional input
 * distribution.
 */
typedef struct CqlabChannel CqlabChannel;

/**
 * Code-construction report returned by [`cqlab_build_code`].
 */
typedef struct CqlabCodeReport {
  /**
   * Number of codewords.
   */
  uint64_t m;
  /**
   * Rate ln(M)/n in nats per letter.
   */
  double rate;
  /**
   * Average decoding error probability.
   */
  double pe;
  /**
   * Premise error delta_n(a).
   */
  double delta;
  /**
   * 1 when the rate bound held numerically.
   */
  int32_t rate_bound_ok;
  /**
   * 1 when the error bound held numerically.
   */
  int32_t error_bound_ok;
  /**
   * 1 when the candidate set was empty and the guarantee is vacuous.
   */
  int32_t vacuous;
} CqlabCodeReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the most recent error message on this thread into `buf`
 * (NUL-terminated, truncated to `len`). Returns the full message length.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null (query mode).
 */
uintptr_t cqlab_last_error_message(char *buf, uintptr_t len);

/**
 * Loads a channel spec file (JSON). Returns null on error; inspect
 * [`cqlab_last_error_message`].
 *
 * # Safety
 * `path` must be a NUL-terminated UTF-8 string.
 */
struct CqlabChannel *cqlab_channel_load(const char *path);

/**
 * Parses a channel spec from a JSON string. Returns null on error.
 *
 * # Safety
 * `json` must be a NUL-terminated UTF-8 string.
 */
struct CqlabChannel *cqlab_channel_load_json(const char *json);

/**
 * Releases a channel handle. Null is ignored.
 *
 * # Safety
 * `handle` must have come from a `cqlab_channel_load*` call and must not be
 * used afterwards.
 */
void cqlab_channel_free(struct CqlabChannel *handle);

/**
 * Output dimension of the channel states, or 0 for a null handle.
 *
 * # Safety
 * `handle` must be valid or null.
 */
uintptr_t cqlab_channel_dim(const struct CqlabChannel *handle);

/**
 * Number of input symbols, or 0 for a null handle.
 *
 * # Safety
 * `handle` must be valid or null.
 */
uintptr_t cqlab_channel_alphabet_size(const struct CqlabChannel *handle);

/**
 * Maximizes the mutual information. Writes the capacity (nats) to `out`.
 *
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum CqlabStatus cqlab_capacity(const struct CqlabChannel *handle, double tol, double *out);

/**
 * Mutual information I(p) in nats. Pass `probs = NULL` to use the spec
 * file's distribution (uniform when the file has none).
 *
 * # Safety
 * `handle` and `out` must be valid; `probs` must be null or point to
 * `probs_len` doubles.
 */
enum CqlabStatus cqlab_mutual_information(const struct CqlabChannel *handle,
                                          const double *probs,
                                          uintptr_t probs_len,
                                          double *out);

/**
 * Averaged first-kind error delta_n(a) of the lifted threshold test.
 *
 * # Safety
 * `handle` and `out` must be valid; `probs` must be null or point to
 * `probs_len` doubles.
 */
enum CqlabStatus cqlab_delta_n(const struct CqlabChannel *handle,
                               const double *probs,
                               uintptr_t probs_len,
                               uintptr_t n,
                               double a,
                               double *out);

/**
 * Builds a greedy block code at threshold rate `a` and fills `report`.
 * `gamma <= 0` selects the automatic schedule.
 *
 * # Safety
 * `handle` and `report` must be valid; `probs` must be null or point to
 * `probs_len` doubles.
 */
enum CqlabStatus cqlab_build_code(const struct CqlabChannel *handle,
                                  const double *probs,
                                  uintptr_t probs_len,
                                  uintptr_t n,
                                  double a,
                                  double gamma,
                                  double lambda,
                                  struct CqlabCodeReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CQLAB_H */
