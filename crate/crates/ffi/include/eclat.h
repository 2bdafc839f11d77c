#ifndef ECLAT_H
#define ECLAT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum EclatStatus {
  ECLAT_STATUS_OK = 0,
  ECLAT_STATUS_NULL_POINTER = 1,
  ECLAT_STATUS_INVALID_PARAMETER = 2,
  ECLAT_STATUS_INFINITE_MOMENT = 3,
  ECLAT_STATUS_MGF_DOMAIN = 4,
  ECLAT_STATUS_NOT_SUB_EXPONENTIAL = 5,
  ECLAT_STATUS_PRECONDITION = 6,
  ECLAT_STATUS_MODEL_INCONSISTENCY = 7,
  ECLAT_STATUS_ZERO_MASS = 8,
  ECLAT_STATUS_RANK_OUT_OF_RANGE = 9,
  ECLAT_STATUS_UNSTABLE = 10,
  ECLAT_STATUS_POLICY_MISMATCH = 11,
  ECLAT_STATUS_INVALID_UTF8 = 12,
  ECLAT_STATUS_PANIC = 99,
} EclatStatus;

typedef enum EclatFamilyKind {
  ECLAT_FAMILY_KIND_EXPONENTIAL = 0,
  ECLAT_FAMILY_KIND_SHIFTED_EXPONENTIAL = 1,
  ECLAT_FAMILY_KIND_WEIBULL = 2,
  ECLAT_FAMILY_KIND_PARETO = 3,
} EclatFamilyKind;

typedef enum EclatPolicyKind {
  // `a` = d.
  ECLAT_POLICY_KIND_NAIVE_REPLICATION = 0,
  // `a` = k, `b` = d.
  ECLAT_POLICY_KIND_K_SPLIT = 1,
  // `a` = n, `b` = k.
  ECLAT_POLICY_KIND_LEAST_K_OF_N = 2,
  // `a` = n, `b` = k.
  ECLAT_POLICY_KIND_BATCH_SAMPLING = 3,
  // `a` = k, `b` = delta.
  ECLAT_POLICY_KIND_REDUNDANT_REQUEST = 4,
} EclatPolicyKind;

// Opaque bound evaluation.
typedef struct EclatBoundReport EclatBoundReport;

// Opaque service distribution.
typedef struct EclatDistribution EclatDistribution;

// Opaque simulation result.
typedef struct EclatLatencyStats EclatLatencyStats;

// Opaque simulation configuration.
typedef struct EclatSimConfig EclatSimConfig;

// A service family of mean-one whole files; `param` is the shift, Weibull
// shape or Pareto tail index (ignored for the exponential).
typedef struct EclatFamily {
  enum EclatFamilyKind kind;
  double param;
} EclatFamily;

typedef struct EclatPolicy {
  enum EclatPolicyKind kind;
  size_t a;
  size_t b;
} EclatPolicy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; empty after success. The
// pointer stays valid until the next call into the library on this thread.
const char *eclat_last_error(void);

// Library version as a static NUL-terminated string.
const char *eclat_version(void);

// # Safety
// `out` must be a valid pointer to writable storage.
enum EclatStatus eclat_dist_new_exponential(double rate, struct EclatDistribution **out);

// # Safety
// `out` must be a valid pointer to writable storage.
enum EclatStatus eclat_dist_new_shifted_exponential(double shift,
                                                    double rate,
                                                    struct EclatDistribution **out);

// # Safety
// `out` must be a valid pointer to writable storage.
enum EclatStatus eclat_dist_new_weibull(double shape, double scale, struct EclatDistribution **out);

// # Safety
// `out` must be a valid pointer to writable storage.
enum EclatStatus eclat_dist_new_pareto(double tail, double x_min, struct EclatDistribution **out);

// Mean-`1/k` member of `family`.
//
// # Safety
// `out` must be a valid pointer to writable storage.
enum EclatStatus eclat_dist_new_chunk(struct EclatFamily family,
                                      size_t k,
                                      struct EclatDistribution **out);

// # Safety
// `dist` must come from an `eclat_dist_new_*` call and not be freed yet, or be null.
void eclat_dist_free(struct EclatDistribution *dist);

// # Safety
// `dist` must be a live handle; `out` writable.
enum EclatStatus eclat_dist_mean(const struct EclatDistribution *dist, double *out);

// `E[X^order]`.
//
// # Safety
// `dist` must be a live handle; `out` writable.
enum EclatStatus eclat_dist_moment(const struct EclatDistribution *dist,
                                   uint32_t order,
                                   double *out);

// `E[exp(s X)]`.
//
// # Safety
// `dist` must be a live handle; `out` writable.
enum EclatStatus eclat_dist_mgf(const struct EclatDistribution *dist, double s, double *out);

// Sub-exponential parameters `(tau^2, b)`.
//
// # Safety
// `dist` must be a live handle; `tau_sq` and `b` writable.
enum EclatStatus eclat_dist_subexp_params(const struct EclatDistribution *dist,
                                          double *tau_sq,
                                          double *b);

// Mean-latency bound for the k-split policy with chunks from `family`.
//
// # Safety
// `out` must be writable.
enum EclatStatus eclat_bound_mean(struct EclatFamily family,
                                  size_t k,
                                  double lambda,
                                  struct EclatBoundReport **out);

// Batch-sampling Bound I (`tight != 0` for the tight variant).
//
// # Safety
// `out` must be writable.
enum EclatStatus eclat_bound_i(double lambda,
                               double d,
                               size_t k,
                               int32_t tight,
                               struct EclatBoundReport **out);

// Batch-sampling Bound II.
//
// # Safety
// `out` must be writable.
enum EclatStatus eclat_bound_ii(double lambda, double d, size_t k, struct EclatBoundReport **out);

// # Safety
// `report` must be a live handle or null.
void eclat_report_free(struct EclatBoundReport *report);

// # Safety
// `report` must be a live handle; `out` writable.
enum EclatStatus eclat_report_value(const struct EclatBoundReport *report, double *out);

// Branch label as a static string, or null for a null handle.
//
// # Safety
// `report` must be a live handle or null.
const char *eclat_report_branch(const struct EclatBoundReport *report);

// Intermediate quantity `key` (for example `"r"` or `"M(k)"`);
// `INVALID_PARAMETER` if absent.
//
// # Safety
// `report` must be a live handle, `key` a NUL-terminated string, `out` writable.
enum EclatStatus eclat_report_aux(const struct EclatBoundReport *report,
                                  const char *key,
                                  double *out);

// Tail bound `P(W > t)` for exponential chunks.
//
// # Safety
// `out` must be writable.
enum EclatStatus eclat_tail_latency_bound(size_t k,
                                          double lambda,
                                          double epsilon,
                                          double t,
                                          double *out);

// `(H(k + delta) - H(delta)) / k`.
//
// # Safety
// `out` must be writable.
enum EclatStatus eclat_redundant_request_latency(size_t k, size_t delta, double *out);

// Zero-load gain of splitting into `k` chunks; Monte Carlo with `seed`
// where no closed form exists.
//
// # Safety
// `out` must be writable.
enum EclatStatus eclat_zero_load_gain(struct EclatFamily family,
                                      size_t k,
                                      uint64_t seed,
                                      double *out);

// Bound on `M(k)` for a service law of mean `1/k`.
//
// # Safety
// `dist` must be a live handle; `out` writable.
enum EclatStatus eclat_m_k_bound(const struct EclatDistribution *dist, size_t k, double *out);

// Simulation config with default cluster size and run lengths.
//
// # Safety
// `out` must be writable.
enum EclatStatus eclat_sim_config_new(struct EclatPolicy policy,
                                      double lambda,
                                      struct EclatFamily family,
                                      uint64_t seed,
                                      struct EclatSimConfig **out);

// Sets the cluster size; the warmup resets to its per-server default.
//
// # Safety
// `config` must be a live handle.
enum EclatStatus eclat_sim_config_set_servers(struct EclatSimConfig *config, size_t servers);

// # Safety
// `config` must be a live handle.
enum EclatStatus eclat_sim_config_set_jobs(struct EclatSimConfig *config,
                                           size_t warmup_jobs,
                                           size_t measured_jobs);

// # Safety
// `config` must be a live handle or null.
void eclat_sim_config_free(struct EclatSimConfig *config);

// Runs the simulation.
//
// # Safety
// `config` must be a live handle; `out` writable.
enum EclatStatus eclat_sim_run(const struct EclatSimConfig *config, struct EclatLatencyStats **out);

// # Safety
// `stats` must be a live handle or null.
void eclat_stats_free(struct EclatLatencyStats *stats);

// Mean latency and its standard error.
//
// # Safety
// `stats` must be a live handle; `mean` and `std_err` writable.
enum EclatStatus eclat_stats_mean(const struct EclatLatencyStats *stats,
                                  double *mean,
                                  double *std_err);

// # Safety
// `stats` must be a live handle; `out` writable.
enum EclatStatus eclat_stats_job_count(const struct EclatLatencyStats *stats, size_t *out);

// Latency quantile at `p` in {0.5, 0.9, 0.99}.
//
// # Safety
// `stats` must be a live handle; `out` writable.
enum EclatStatus eclat_stats_quantile(const struct EclatLatencyStats *stats, double p, double *out);

// Empirical `P(Q >= r)` at arrival epochs.
//
// # Safety
// `stats` must be a live handle; `out` writable.
enum EclatStatus eclat_stats_queue_tail(const struct EclatLatencyStats *stats,
                                        size_t r,
                                        double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ECLAT_H */
