#ifndef OPSPLIT_H
#define OPSPLIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OpsplitStatus {
  OPSPLIT_STATUS_OK = 0,
  OPSPLIT_STATUS_INVALID_ARGUMENT = 1,
  OPSPLIT_STATUS_DOMAIN = 2,
  OPSPLIT_STATUS_STEP_SIZE = 3,
  OPSPLIT_STATUS_NO_OPTIMUM = 4,
  OPSPLIT_STATUS_NULL_POINTER = 5,
  OPSPLIT_STATUS_NOT_FOUND = 6,
  OPSPLIT_STATUS_BUFFER_TOO_SMALL = 7,
  OPSPLIT_STATUS_RUNTIME = 8,
  OPSPLIT_STATUS_IO = 9,
  OPSPLIT_STATUS_PANIC = 10,
} OpsplitStatus;

/**
 * Values accepted by the `algorithm` parameters.
 */
typedef enum OpsplitAlgorithm {
  OPSPLIT_ALGORITHM_EA = 0,
  OPSPLIT_ALGORITHM_PPA = 1,
  OPSPLIT_ALGORITHM_FBS_GRAD_F_PROX_G = 2,
  OPSPLIT_ALGORITHM_FBS_GRAD_G_PROX_F = 3,
  OPSPLIT_ALGORITHM_PRS = 4,
  OPSPLIT_ALGORITHM_DRS = 5,
  OPSPLIT_ALGORITHM_EA_SINGLE = 6,
  OPSPLIT_ALGORITHM_PROX_SINGLE = 7,
} OpsplitAlgorithm;

/**
 * Values accepted by the `setting` parameters.
 */
typedef enum OpsplitSetting {
  OPSPLIT_SETTING_COCOERCIVE = 0,
  OPSPLIT_SETTING_OPTIMIZATION = 1,
} OpsplitSetting;

typedef enum OpsplitWinner {
  OPSPLIT_WINNER_FBS_PROX_F = 0,
  OPSPLIT_WINNER_DRS = 1,
  OPSPLIT_WINNER_PRS = 2,
} OpsplitWinner;

typedef enum OpsplitRegion {
  OPSPLIT_REGION_OMEGA1 = 0,
  OPSPLIT_REGION_OMEGA2 = 1,
  OPSPLIT_REGION_COMPLEMENT = 2,
} OpsplitRegion;

/**
 * Benchmark schemes; bit `1 << value` selects a scheme in `scheme_mask`.
 */
typedef enum OpsplitScheme {
  OPSPLIT_SCHEME_EA = 0,
  OPSPLIT_SCHEME_FBS = 1,
  OPSPLIT_SCHEME_FBS2 = 2,
  OPSPLIT_SCHEME_FBS3 = 3,
  OPSPLIT_SCHEME_PRS = 4,
  OPSPLIT_SCHEME_DRS = 5,
} OpsplitScheme;

/**
 * Result of a denoising or restoration run.
 */
typedef struct OpsplitExperiment OpsplitExperiment;

typedef struct OpsplitDenoiseConfig {
  size_t n;
  size_t n_segments;
  double noise_sigma;
  double chi;
  double mu;
  uint32_t scheme_mask;
  size_t max_iter;
  double stop_tol;
  uint64_t seed;
} OpsplitDenoiseConfig;

typedef struct OpsplitRestoreConfig {
  size_t n_pixels;
  size_t m_rows;
  double chi;
  double mu;
  size_t wavelet_levels;
  uint32_t scheme_mask;
  double noise_sigma;
  size_t max_iter;
  double stop_tol;
  uint64_t seed;
} OpsplitRestoreConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *opsplit_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *opsplit_version(void);

/**
 * Lipschitz constant of `algorithm` at step-size `tau`. Pass
 * `beta = INFINITY` for `B = 0`.
 *
 * # Safety
 * `out_rate` must be valid for writes.
 */
enum OpsplitStatus opsplit_rate(int32_t setting_code,
                                int32_t algorithm_code,
                                double alpha,
                                double beta,
                                double rho,
                                double tau,
                                double *out_rate);

/**
 * Optimal step-size and the rate it attains.
 *
 * # Safety
 * `out_tau` and `out_rate` must be valid for writes.
 */
enum OpsplitStatus opsplit_optimal(int32_t setting_code,
                                   int32_t algorithm_code,
                                   double alpha,
                                   double beta,
                                   double rho,
                                   double *out_tau,
                                   double *out_rate);

/**
 * Averagedness constant of `algorithm` when `rho = 0`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum OpsplitStatus opsplit_averaged_constant(int32_t algorithm_code,
                                             double alpha,
                                             double beta,
                                             double tau,
                                             double *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum OpsplitStatus opsplit_eta(double beta, double *out);

/**
 * Most efficient scheme at the normalized point `(beta, rho)`; writes an
 * [`OpsplitWinner`] and an [`OpsplitRegion`] value.
 *
 * # Safety
 * `out_winner` and `out_region` must be valid for writes.
 */
enum OpsplitStatus opsplit_classify(double beta,
                                    double rho,
                                    int32_t *out_winner,
                                    int32_t *out_region);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum OpsplitStatus opsplit_denoise_default_config(struct OpsplitDenoiseConfig *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum OpsplitStatus opsplit_restore_default_config(struct OpsplitRestoreConfig *out);

/**
 * Run the denoising benchmark. On success `*out` owns a new handle.
 *
 * # Safety
 * `cfg` must point to a valid config and `out` must be valid for writes.
 */
enum OpsplitStatus opsplit_denoise_run(const struct OpsplitDenoiseConfig *cfg,
                                       struct OpsplitExperiment **out);

/**
 * Run the restoration benchmark. On success `*out` owns a new handle.
 *
 * # Safety
 * `cfg` must point to a valid config and `out` must be valid for writes.
 */
enum OpsplitStatus opsplit_restore_run(const struct OpsplitRestoreConfig *cfg,
                                       struct OpsplitExperiment **out);

/**
 * Step-size, theoretical rate and first iteration with error at most
 * `1e-3 * error_0` (`-1` if never reached) of one scheme.
 *
 * # Safety
 * `h` must be a live handle; out pointers must be valid for writes.
 */
enum OpsplitStatus opsplit_experiment_scheme_info(const struct OpsplitExperiment *h,
                                                  int32_t scheme_code,
                                                  double *out_tau,
                                                  double *out_rate,
                                                  int64_t *out_iterations_to_1e3);

/**
 * Number of recorded errors of one scheme (iterations run plus one).
 *
 * # Safety
 * `h` must be a live handle; `out_len` must be valid for writes.
 */
enum OpsplitStatus opsplit_experiment_trace_len(const struct OpsplitExperiment *h,
                                                int32_t scheme_code,
                                                size_t *out_len);

/**
 * Copy the error trace of one scheme into `buf`.
 *
 * # Safety
 * `h` must be a live handle and `buf` valid for `capacity` writes.
 */
enum OpsplitStatus opsplit_experiment_trace_copy(const struct OpsplitExperiment *h,
                                                 int32_t scheme_code,
                                                 double *buf,
                                                 size_t capacity);

/**
 * # Safety
 * `h` must be a live handle; `out_len` must be valid for writes.
 */
enum OpsplitStatus opsplit_experiment_solution_len(const struct OpsplitExperiment *h,
                                                   size_t *out_len);

/**
 * Copy the reference solution into `buf`.
 *
 * # Safety
 * `h` must be a live handle and `buf` valid for `capacity` writes.
 */
enum OpsplitStatus opsplit_experiment_solution_copy(const struct OpsplitExperiment *h,
                                                    double *buf,
                                                    size_t capacity);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void opsplit_experiment_free(struct OpsplitExperiment *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPSPLIT_H */
