#ifndef QGRAND_H
#define QGRAND_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Length of `QgEvalSummary.f_by_weight`.
 */
#define QG_MAX_REPORTED_WEIGHT 8

/**
 * Limit value meaning "no limit".
 */
#define QG_UNLIMITED UINT64_MAX

typedef enum QgStatus {
  QG_STATUS_OK = 0,
  /**
   * Null pointer, bad UTF-8 or undersized buffer.
   */
  QG_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Parameters rejected by the library.
   */
  QG_STATUS_VALIDATION = 2,
  QG_STATUS_IO = 3,
  QG_STATUS_INTERNAL = 4,
  QG_STATUS_PANIC = 5,
} QgStatus;

typedef enum QgDecodeKind {
  QG_DECODE_KIND_NO_ERROR = 0,
  QG_DECODE_KIND_CORRECTED = 1,
  QG_DECODE_KIND_ABANDONED = 2,
} QgDecodeKind;

typedef struct QgCode QgCode;

typedef struct QgNoise QgNoise;

typedef struct QgTable QgTable;

typedef struct QgEvalSummary {
  double success_prob;
  double bler;
  double conditional_bler;
  double f_min_bound;
  uint64_t unique_syndromes;
  uint64_t collisions;
  uint64_t degenerate_count;
  /**
   * `f_by_weight[t]` for `t = 0..QG_MAX_REPORTED_WEIGHT`; NaN when no
   * weight-`t` pattern is listed. Entry 0 is always NaN.
   */
  double f_by_weight[QG_MAX_REPORTED_WEIGHT];
} QgEvalSummary;

typedef struct QgMeasurementCost {
  double c_s_half;
  double c_s_p0;
  double iterations;
  double total;
  double bound;
} QgMeasurementCost;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on this thread.
 */
const char *qg_last_error(void);

/**
 * Builds an `(n, k)` code from `num_gates` random two-qubit Cliffords.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QgStatus qg_code_build(size_t n,
                            size_t k,
                            size_t num_gates,
                            uint64_t seed,
                            struct QgCode **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QgStatus qg_code_load(const char *path, struct QgCode **out);

/**
 * # Safety
 * `code` must come from this library; `path` must be NUL-terminated.
 */
enum QgStatus qg_code_save(const struct QgCode *code, const char *path);

/**
 * # Safety
 * `code` must come from this library and not be used afterwards. Null is ignored.
 */
void qg_code_free(struct QgCode *code);

/**
 * Physical qubits, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or come from this library.
 */
size_t qg_code_n(const struct QgCode *code);

/**
 * # Safety
 * `code` must be null or come from this library.
 */
size_t qg_code_k(const struct QgCode *code);

/**
 * # Safety
 * `code` must be null or come from this library.
 */
size_t qg_code_num_gates(const struct QgCode *code);

/**
 * # Safety
 * `code` must be null or come from this library.
 */
uint64_t qg_code_seed(const struct QgCode *code);

/**
 * Writes stabilizer `index` as a signed string such as `-XZIY` plus a NUL.
 * `*written` receives the length without the NUL; when `len` is too
 * small nothing is copied, `*written` still holds the required length
 * and `QG_STATUS_INVALID_ARGUMENT` is returned.
 *
 * # Safety
 * `buf` must point to `len` writable bytes; `written` must be valid.
 */
enum QgStatus qg_code_stabilizer(const struct QgCode *code,
                                 size_t index,
                                 char *buf,
                                 size_t len,
                                 size_t *written);

/**
 * Syndrome of a Pauli string (e.g. `"XIZY"`), one byte 0/1 per stabilizer.
 *
 * # Safety
 * `pauli` must be NUL-terminated; `bits` must point to `len ≥ n − k` bytes.
 */
enum QgStatus qg_code_syndrome(const struct QgCode *code,
                               const char *pauli,
                               uint8_t *bits,
                               size_t len);

/**
 * Depolarizing noise over `n` qubits listing every pattern of weight ≤ `t_max`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QgStatus qg_noise_bernoulli(size_t n, double p, size_t t_max, struct QgNoise **out);

/**
 * # Safety
 * `noise` must come from this library and not be used afterwards. Null is ignored.
 */
void qg_noise_free(struct QgNoise *noise);

/**
 * Listed patterns including the identity, or 0 for a null handle.
 *
 * # Safety
 * `noise` must be null or come from this library.
 */
uint64_t qg_noise_len(const struct QgNoise *noise);

/**
 * Probability mass outside the listed patterns; NaN for a null handle.
 *
 * # Safety
 * `noise` must be null or come from this library.
 */
double qg_noise_residual(const struct QgNoise *noise);

/**
 * Shannon entropy in bits of the listed probabilities; NaN for a null handle.
 *
 * # Safety
 * `noise` must be null or come from this library.
 */
double qg_noise_entropy(const struct QgNoise *noise);

/**
 * Semi-analytic evaluation of `code` under `noise`.
 *
 * # Safety
 * Handles must come from this library; `out` must be valid.
 */
enum QgStatus qg_evaluate(const struct QgCode *code,
                          const struct QgNoise *noise,
                          struct QgEvalSummary *out);

/**
 * Syndrome table storing the first `precompute_limit + 1` patterns
 * (`QG_UNLIMITED` stores all).
 *
 * # Safety
 * Handles must come from this library; `out` must be valid.
 */
enum QgStatus qg_table_build(const struct QgCode *code,
                             const struct QgNoise *noise,
                             uint64_t precompute_limit,
                             struct QgTable **out);

/**
 * # Safety
 * `table` must come from this library and not be used afterwards. Null is ignored.
 */
void qg_table_free(struct QgTable *table);

/**
 * Number of syndromes with a leader; 0 for a null handle.
 *
 * # Safety
 * `table` must be null or come from this library.
 */
uint64_t qg_table_occupied(const struct QgTable *table);

/**
 * Decodes a syndrome given as `len` bytes 0/1. On `QG_DECODE_KIND_CORRECTED`
 * `*index` is the leader's position in the noise order; otherwise 0.
 * `abandon_after = QG_UNLIMITED` never abandons.
 *
 * # Safety
 * `bits` must point to `len` readable bytes; `kind` and `index` must be valid.
 */
enum QgStatus qg_table_decode(const struct QgTable *table,
                              const uint8_t *bits,
                              size_t len,
                              uint64_t abandon_after,
                              enum QgDecodeKind *kind,
                              uint64_t *index);

/**
 * Expected membership-test cost with `s` stabilizers under `noise`.
 *
 * # Safety
 * `noise` must come from this library; `out` must be valid.
 */
enum QgStatus qg_measurement_cost(size_t s,
                                  const struct QgNoise *noise,
                                  struct QgMeasurementCost *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QGRAND_H */
