/* C interface for the agnostic estimation library.
 *
 * All functions return agn_status; AGN_OK means the out-parameters were
 * written. On failure agn_last_error() returns a thread-local message
 * describing what went wrong. Matrices are row-major double arrays sized by
 * the caller from agn_dataset_rows / agn_dataset_dim.
 */
#ifndef AGNOSTIC_AGNOSTIC_H
#define AGNOSTIC_AGNOSTIC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum agn_status {
  AGN_OK = 0,
  AGN_ERR_CONFIG = 1,
  AGN_ERR_INSUFFICIENT_SAMPLES = 2,
  AGN_ERR_EMPTY_INPUT = 3,
  AGN_ERR_ZERO_WEIGHT_MASS = 4,
  AGN_ERR_CONVERGENCE = 5,
  AGN_ERR_SINGULAR_MATRIX = 6,
  AGN_ERR_DEGRADED_REGIME = 7,
  AGN_ERR_DIMENSION_CAP = 8,
  AGN_ERR_EMPTY_SURVIVOR_SET = 9,
  AGN_ERR_STALLED_PROGRESS = 10,
  AGN_ERR_IO = 11,
  AGN_ERR_SPEC = 12,
  AGN_ERR_INVALID_ARGUMENT = 13,
  AGN_ERR_INTERNAL = 14
} agn_status;

typedef enum agn_mode { AGN_MODE_GAUSSIAN = 0, AGN_MODE_BOUNDED = 1 } agn_mode;

typedef struct agn_config {
  double eta;  /* contamination fraction, [0, 1/2.1) */
  double eps;  /* statistical slack, (0, 1) */
  agn_mode mode;
  double c4;     /* fourth-moment ratio (bounded mode; gaussian pins 3) */
  double c42;    /* fourth-moment ratio of squared deviations */
  double gamma_; /* tail exponent (bounded mode; gaussian pins 2) */
  double eps1;   /* damping scale constant, (0, 1] */
  int fresh_samples;
  double opnorm_c1;
  double opnorm_c2;
  double opnorm_c3;
  double opnorm_iter_scale;
  uint64_t seed;
  int dim_cap;
  double refine_max_eta_log_n;
} agn_config;

/* Fills every field with its default. Never fails. */
void agn_config_default(agn_config* cfg);
agn_status agn_config_validate(const agn_config* cfg);

/* Opaque dataset handle: m samples in n dimensions, optionally carrying
 * per-row corruption labels and the generating ground truth. */
typedef struct agn_dataset agn_dataset;

agn_status agn_dataset_create(const double* rows, size_t m, size_t n, agn_dataset** out);
agn_status agn_dataset_load(const char* path, agn_dataset** out);
agn_status agn_dataset_save(const agn_dataset* d, const char* path);
void agn_dataset_free(agn_dataset* d);

size_t agn_dataset_rows(const agn_dataset* d);
size_t agn_dataset_dim(const agn_dataset* d);
agn_status agn_dataset_copy_rows(const agn_dataset* d, double* out /* m*n */);
int agn_dataset_has_labels(const agn_dataset* d);
int agn_dataset_has_truth(const agn_dataset* d);
agn_status agn_dataset_copy_labels(const agn_dataset* d, uint8_t* out /* m */);
agn_status agn_dataset_truth_mean(const agn_dataset* d, double* out /* n */);
agn_status agn_dataset_truth_cov(const agn_dataset* d, double* out /* n*n */);
/* Largest eigenvalue magnitude of the ground-truth covariance. */
agn_status agn_dataset_truth_opnorm(const agn_dataset* d, double* out);

/* Robust mean; mean_out has length n. levels_out may be NULL. */
agn_status agn_mean(const agn_dataset* d, const agn_config* cfg, double* mean_out,
                    int* levels_out);

/* Gaussian-only refinement of the robust mean. */
agn_status agn_refine_mean(const agn_dataset* d, const agn_config* cfg, double* mean_out,
                           int* levels_out);

/* Robust covariance; cov_out has length n*n (row-major). psd != 0 clamps the
 * estimate to the PSD cone; psd_projected_out may be NULL. */
agn_status agn_covariance(const agn_dataset* d, const agn_config* cfg, int psd,
                          double* cov_out, int* psd_projected_out);

/* Rank-k truncation of the robust covariance; cov_out has length n*n. */
agn_status agn_svd(const agn_dataset* d, const agn_config* cfg, size_t k, double* cov_out);

typedef struct agn_opnorm_result {
  double lambda_hat;
  int iterations;
  int terminated_by; /* 0 threshold, 1 iteration cap */
  uint64_t removed_safe;
  uint64_t removed_loop;
} agn_opnorm_result;

/* Robust top eigenvalue of the covariance. center != 0 subtracts the robust
 * mean first; pass 0 only for data that is already mean-zero. */
agn_status agn_opnorm(const agn_dataset* d, const agn_config* cfg, int center,
                      agn_opnorm_result* out);

/* Classical baselines. */
agn_status agn_sample_mean(const agn_dataset* d, double* mean_out);
agn_status agn_sample_covariance(const agn_dataset* d, double* mean_out /* nullable */,
                                 double* cov_out);
agn_status agn_coordinate_median(const agn_dataset* d, double* out);
agn_status agn_geometric_median(const agn_dataset* d, double tol, int max_iter,
                                double* out, int* iterations_out /* nullable */,
                                int* converged_out /* nullable */);

/* Experiment runner. out_dir / out_csv NULL means the spec file's "out";
 * seed_override NULL means the spec file's "seed". */
agn_status agn_run_simulate(const char* spec_path, const char* out_dir,
                            const uint64_t* seed_override, size_t* files_out /* nullable */);
agn_status agn_run_bench(const char* spec_path, const char* out_csv,
                         const uint64_t* seed_override, int* rows_out /* nullable */,
                         int* failures_out /* nullable */);

const char* agn_status_name(agn_status status);
/* Message from the most recent failure on this thread; empty if none. */
const char* agn_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* AGNOSTIC_AGNOSTIC_H */
