#include "agnostic/agnostic.h"

#include <cstring>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agnostic_covariance.hpp"
#include "agnostic_mean.hpp"
#include "baselines.hpp"
#include "dataset_io.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "operator_norm.hpp"
#include "spectral.hpp"
#include "types.hpp"

struct agn_dataset {
  agnostic::Dataset data;
  std::optional<std::vector<std::uint8_t>> labels;
  std::optional<agnostic::GroundTruth> truth;
};

namespace {

thread_local std::string tl_error;

agn_status map_code(agnostic::ErrorCode code) {
  using agnostic::ErrorCode;
  switch (code) {
    case ErrorCode::Config: return AGN_ERR_CONFIG;
    case ErrorCode::InsufficientSamples: return AGN_ERR_INSUFFICIENT_SAMPLES;
    case ErrorCode::EmptyInput: return AGN_ERR_EMPTY_INPUT;
    case ErrorCode::ZeroWeightMass: return AGN_ERR_ZERO_WEIGHT_MASS;
    case ErrorCode::ConvergenceFailure: return AGN_ERR_CONVERGENCE;
    case ErrorCode::SingularMatrix: return AGN_ERR_SINGULAR_MATRIX;
    case ErrorCode::DegradedRegime: return AGN_ERR_DEGRADED_REGIME;
    case ErrorCode::DimensionCap: return AGN_ERR_DIMENSION_CAP;
    case ErrorCode::EmptySurvivorSet: return AGN_ERR_EMPTY_SURVIVOR_SET;
    case ErrorCode::StalledProgress: return AGN_ERR_STALLED_PROGRESS;
    case ErrorCode::Io: return AGN_ERR_IO;
    case ErrorCode::Spec: return AGN_ERR_SPEC;
  }
  return AGN_ERR_INTERNAL;
}

template <class F>
agn_status guard(F&& body) {
  try {
    body();
    return AGN_OK;
  } catch (const agnostic::Error& e) {
    tl_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    tl_error = e.what();
    return AGN_ERR_INTERNAL;
  } catch (...) {
    tl_error = "unknown failure";
    return AGN_ERR_INTERNAL;
  }
}

agn_status invalid(const char* message) {
  tl_error = message;
  return AGN_ERR_INVALID_ARGUMENT;
}

agnostic::EstimatorConfig to_config(const agn_config& c) {
  agnostic::EstimatorConfig cfg;
  cfg.eta = c.eta;
  cfg.eps = c.eps;
  cfg.profile.mode =
      c.mode == AGN_MODE_GAUSSIAN ? agnostic::Mode::Gaussian : agnostic::Mode::BoundedMoment;
  cfg.profile.c4 = c.c4;
  cfg.profile.c42 = c.c42;
  cfg.profile.gamma = c.gamma_;
  cfg.eps1 = c.eps1;
  cfg.fresh_samples = c.fresh_samples != 0;
  cfg.opnorm.c1 = c.opnorm_c1;
  cfg.opnorm.c2 = c.opnorm_c2;
  cfg.opnorm.c3 = c.opnorm_c3;
  cfg.opnorm.max_iter_scale = c.opnorm_iter_scale;
  cfg.seed = c.seed;
  cfg.dim_cap = c.dim_cap;
  cfg.refine_max_eta_log_n = c.refine_max_eta_log_n;
  return cfg;
}

void copy_matrix(const agnostic::Matrix& m, double* out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) *out++ = m(i, j);
  }
}

void copy_vector(const agnostic::Vector& v, double* out) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i];
}

}  // namespace

extern "C" {

void agn_config_default(agn_config* cfg) {
  if (!cfg) return;
  agnostic::EstimatorConfig d;
  cfg->eta = d.eta;
  cfg->eps = d.eps;
  cfg->mode = AGN_MODE_GAUSSIAN;
  cfg->c4 = d.profile.c4;
  cfg->c42 = d.profile.c42;
  cfg->gamma_ = d.profile.gamma;
  cfg->eps1 = d.eps1;
  cfg->fresh_samples = d.fresh_samples ? 1 : 0;
  cfg->opnorm_c1 = d.opnorm.c1;
  cfg->opnorm_c2 = d.opnorm.c2;
  cfg->opnorm_c3 = d.opnorm.c3;
  cfg->opnorm_iter_scale = d.opnorm.max_iter_scale;
  cfg->seed = d.seed;
  cfg->dim_cap = d.dim_cap;
  cfg->refine_max_eta_log_n = d.refine_max_eta_log_n;
}

agn_status agn_config_validate(const agn_config* cfg) {
  if (!cfg) return invalid("cfg must not be NULL");
  return guard([&] { agnostic::validate_config(to_config(*cfg)); });
}

agn_status agn_dataset_create(const double* rows, size_t m, size_t n, agn_dataset** out) {
  if (!rows || !out) return invalid("rows and out must not be NULL");
  return guard([&] {
    agnostic::Matrix x(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = 0; j < n; ++j) {
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i * n + j];
      }
    }
    *out = new agn_dataset{agnostic::Dataset(std::move(x)), std::nullopt, std::nullopt};
  });
}

agn_status agn_dataset_load(const char* path, agn_dataset** out) {
  if (!path || !out) return invalid("path and out must not be NULL");
  return guard([&] {
    agnostic::RmdsFile file = agnostic::load_rmds(path);
    *out = new agn_dataset{std::move(file.data), std::move(file.labels), std::move(file.truth)};
  });
}

agn_status agn_dataset_save(const agn_dataset* d, const char* path) {
  if (!d || !path) return invalid("dataset and path must not be NULL");
  return guard([&] {
    agnostic::save_rmds(path, d->data, d->labels ? &*d->labels : nullptr,
                        d->truth ? &*d->truth : nullptr);
  });
}

void agn_dataset_free(agn_dataset* d) { delete d; }

size_t agn_dataset_rows(const agn_dataset* d) {
  return d ? static_cast<size_t>(d->data.m()) : 0;
}

size_t agn_dataset_dim(const agn_dataset* d) {
  return d ? static_cast<size_t>(d->data.n()) : 0;
}

agn_status agn_dataset_copy_rows(const agn_dataset* d, double* out) {
  if (!d || !out) return invalid("dataset and out must not be NULL");
  copy_matrix(d->data.rows(), out);
  return AGN_OK;
}

int agn_dataset_has_labels(const agn_dataset* d) { return d && d->labels ? 1 : 0; }

int agn_dataset_has_truth(const agn_dataset* d) { return d && d->truth ? 1 : 0; }

agn_status agn_dataset_copy_labels(const agn_dataset* d, uint8_t* out) {
  if (!d || !out) return invalid("dataset and out must not be NULL");
  if (!d->labels) return invalid("dataset carries no labels");
  std::memcpy(out, d->labels->data(), d->labels->size());
  return AGN_OK;
}

agn_status agn_dataset_truth_mean(const agn_dataset* d, double* out) {
  if (!d || !out) return invalid("dataset and out must not be NULL");
  if (!d->truth) return invalid("dataset carries no ground truth");
  copy_vector(d->truth->mean, out);
  return AGN_OK;
}

agn_status agn_dataset_truth_cov(const agn_dataset* d, double* out) {
  if (!d || !out) return invalid("dataset and out must not be NULL");
  if (!d->truth) return invalid("dataset carries no ground truth");
  copy_matrix(d->truth->covariance.mat(), out);
  return AGN_OK;
}

agn_status agn_dataset_truth_opnorm(const agn_dataset* d, double* out) {
  if (!d || !out) return invalid("dataset and out must not be NULL");
  if (!d->truth) return invalid("dataset carries no ground truth");
  return guard([&] {
    agnostic::SubspaceSplit es = agnostic::eigensystem(d->truth->covariance);
    *out = es.eigenvalues.cwiseAbs().maxCoeff();
  });
}

agn_status agn_mean(const agn_dataset* d, const agn_config* cfg, double* mean_out,
                    int* levels_out) {
  if (!d || !cfg || !mean_out) return invalid("dataset, cfg, and mean_out must not be NULL");
  return guard([&] {
    agnostic::MeanEstimate est = agnostic::agnostic_mean(d->data, to_config(*cfg));
    copy_vector(est.mean, mean_out);
    if (levels_out) *levels_out = est.levels;
  });
}

agn_status agn_refine_mean(const agn_dataset* d, const agn_config* cfg, double* mean_out,
                           int* levels_out) {
  if (!d || !cfg || !mean_out) return invalid("dataset, cfg, and mean_out must not be NULL");
  return guard([&] {
    agnostic::MeanEstimate est = agnostic::refine_mean_gaussian(d->data, to_config(*cfg));
    copy_vector(est.mean, mean_out);
    if (levels_out) *levels_out = est.levels;
  });
}

agn_status agn_covariance(const agn_dataset* d, const agn_config* cfg, int psd,
                          double* cov_out, int* psd_projected_out) {
  if (!d || !cfg || !cov_out) return invalid("dataset, cfg, and cov_out must not be NULL");
  return guard([&] {
    agnostic::CovEstimate est =
        agnostic::agnostic_covariance(d->data, to_config(*cfg), psd != 0);
    copy_matrix(est.sigma_hat.mat(), cov_out);
    if (psd_projected_out) *psd_projected_out = est.psd_projected ? 1 : 0;
  });
}

agn_status agn_svd(const agn_dataset* d, const agn_config* cfg, size_t k, double* cov_out) {
  if (!d || !cfg || !cov_out) return invalid("dataset, cfg, and cov_out must not be NULL");
  return guard([&] {
    agnostic::SymMatrix est =
        agnostic::agnostic_svd(d->data, static_cast<Eigen::Index>(k), to_config(*cfg));
    copy_matrix(est.mat(), cov_out);
  });
}

agn_status agn_opnorm(const agn_dataset* d, const agn_config* cfg, int center,
                      agn_opnorm_result* out) {
  if (!d || !cfg || !out) return invalid("dataset, cfg, and out must not be NULL");
  return guard([&] {
    agnostic::EstimatorConfig config = to_config(*cfg);
    agnostic::OpNormResult res;
    if (center) {
      agnostic::MeanEstimate mu = agnostic::agnostic_mean(d->data, config);
      agnostic::Matrix rows = d->data.rows().rowwise() - mu.mean.transpose();
      res = agnostic::agnostic_opnorm(agnostic::Dataset(std::move(rows)), config);
    } else {
      res = agnostic::agnostic_opnorm(d->data, config);
    }
    out->lambda_hat = res.lambda_hat;
    out->iterations = res.iterations;
    out->terminated_by = res.terminated_by == agnostic::OpNormTermination::Threshold ? 0 : 1;
    out->removed_safe =
        res.removed_per_iter.empty() ? 0 : static_cast<uint64_t>(res.removed_per_iter[0]);
    uint64_t loop = 0;
    for (std::size_t i = 1; i < res.removed_per_iter.size(); ++i) {
      loop += static_cast<uint64_t>(res.removed_per_iter[i]);
    }
    out->removed_loop = loop;
  });
}

agn_status agn_sample_mean(const agn_dataset* d, double* mean_out) {
  if (!d || !mean_out) return invalid("dataset and mean_out must not be NULL");
  return guard([&] { copy_vector(agnostic::sample_mean(d->data), mean_out); });
}

agn_status agn_sample_covariance(const agn_dataset* d, double* mean_out, double* cov_out) {
  if (!d || !cov_out) return invalid("dataset and cov_out must not be NULL");
  return guard([&] {
    agnostic::SampleMoments moments = agnostic::sample_covariance(d->data);
    if (mean_out) copy_vector(moments.mean, mean_out);
    copy_matrix(moments.covariance.mat(), cov_out);
  });
}

agn_status agn_coordinate_median(const agn_dataset* d, double* out) {
  if (!d || !out) return invalid("dataset and out must not be NULL");
  return guard([&] { copy_vector(agnostic::coordinate_median(d->data), out); });
}

agn_status agn_geometric_median(const agn_dataset* d, double tol, int max_iter, double* out,
                                int* iterations_out, int* converged_out) {
  if (!d || !out) return invalid("dataset and out must not be NULL");
  return guard([&] {
    agnostic::WeiszfeldState state = agnostic::geometric_median(d->data, tol, max_iter);
    copy_vector(state.iterate, out);
    if (iterations_out) *iterations_out = state.iterations;
    if (converged_out) *converged_out = state.converged ? 1 : 0;
  });
}

agn_status agn_run_simulate(const char* spec_path, const char* out_dir,
                            const uint64_t* seed_override, size_t* files_out) {
  if (!spec_path) return invalid("spec_path must not be NULL");
  return guard([&] {
    agnostic::ExperimentSpec spec = agnostic::load_spec(spec_path);
    if (seed_override) spec.seed = *seed_override;
    std::string dir = out_dir ? out_dir : spec.out;
    std::vector<std::string> files = agnostic::run_simulate(spec, dir);
    if (files_out) *files_out = files.size();
  });
}

agn_status agn_run_bench(const char* spec_path, const char* out_csv,
                         const uint64_t* seed_override, int* rows_out, int* failures_out) {
  if (!spec_path) return invalid("spec_path must not be NULL");
  return guard([&] {
    agnostic::ExperimentSpec spec = agnostic::load_spec(spec_path);
    if (seed_override) spec.seed = *seed_override;
    std::string csv = out_csv ? out_csv : spec.out;
    agnostic::BenchResult res = agnostic::run_bench(spec, csv);
    if (rows_out) *rows_out = res.rows;
    if (failures_out) *failures_out = res.failures;
  });
}

const char* agn_status_name(agn_status status) {
  switch (status) {
    case AGN_OK: return "ok";
    case AGN_ERR_CONFIG: return "config";
    case AGN_ERR_INSUFFICIENT_SAMPLES: return "insufficient_samples";
    case AGN_ERR_EMPTY_INPUT: return "empty_input";
    case AGN_ERR_ZERO_WEIGHT_MASS: return "zero_weight_mass";
    case AGN_ERR_CONVERGENCE: return "convergence_failure";
    case AGN_ERR_SINGULAR_MATRIX: return "singular_matrix";
    case AGN_ERR_DEGRADED_REGIME: return "degraded_regime";
    case AGN_ERR_DIMENSION_CAP: return "dimension_cap";
    case AGN_ERR_EMPTY_SURVIVOR_SET: return "empty_survivor_set";
    case AGN_ERR_STALLED_PROGRESS: return "stalled_progress";
    case AGN_ERR_IO: return "io";
    case AGN_ERR_SPEC: return "spec";
    case AGN_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case AGN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* agn_last_error(void) { return tl_error.c_str(); }

}  // extern "C"
