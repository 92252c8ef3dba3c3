// agnest: command-line front end for the agnostic estimation library.
// Talks to the library exclusively through the C API; JSON here is
// presentation only.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "agnostic/agnostic.h"

namespace {

using nlohmann::json;

// Exit codes: 0 success, 1 estimator error, 2 config/spec error, 3 I/O error.
int exit_code_for(agn_status status) {
  switch (status) {
    case AGN_OK:
      return 0;
    case AGN_ERR_CONFIG:
    case AGN_ERR_SPEC:
    case AGN_ERR_DIMENSION_CAP:
      return 2;
    case AGN_ERR_IO:
      return 3;
    default:
      return 1;
  }
}

[[noreturn]] void fail(agn_status status) {
  json record = {
      {"error", {{"code", agn_status_name(status)}, {"message", agn_last_error()}}}};
  std::fputs(record.dump().c_str(), stderr);
  std::fputc('\n', stderr);
  std::exit(exit_code_for(status));
}

void check(agn_status status) {
  if (status != AGN_OK) fail(status);
}

void emit(const json& record) {
  std::fputs(record.dump().c_str(), stdout);
  std::fputc('\n', stdout);
}

struct EstimateFlags {
  double eta = 0.05;
  double eps = 0.05;
  std::string mode = "gaussian";
  bool fresh_samples = false;
  bool psd = true;
  std::uint64_t seed = 0;
  double c4 = 3.0;
  double c42 = 15.0;
  double gamma = 2.0;
  double eps1 = 0.1;
};

void add_estimate_flags(CLI::App* cmd, EstimateFlags& flags) {
  cmd->add_option("--eta", flags.eta, "contamination fraction");
  cmd->add_option("--eps", flags.eps, "statistical slack");
  cmd->add_option("--mode", flags.mode, "moment model: gaussian|bounded")
      ->check(CLI::IsMember({"gaussian", "bounded"}));
  cmd->add_flag("--fresh-samples", flags.fresh_samples,
                "consume a disjoint sample chunk per recursion level");
  cmd->add_option("--seed", flags.seed, "seed for randomized refinement");
  cmd->add_option("--c4", flags.c4, "fourth-moment ratio (bounded mode)");
  cmd->add_option("--c42", flags.c42, "fourth-moment ratio of squared deviations");
  cmd->add_option("--gamma", flags.gamma, "tail exponent (bounded mode)");
  cmd->add_option("--eps1", flags.eps1, "damping scale constant");
}

agn_config to_config(const EstimateFlags& flags) {
  agn_config cfg;
  agn_config_default(&cfg);
  cfg.eta = flags.eta;
  cfg.eps = flags.eps;
  cfg.mode = flags.mode == "bounded" ? AGN_MODE_BOUNDED : AGN_MODE_GAUSSIAN;
  if (flags.mode == "bounded") {
    cfg.c4 = flags.c4;
    cfg.gamma_ = flags.gamma;
  }
  cfg.c42 = flags.c42;
  cfg.eps1 = flags.eps1;
  cfg.fresh_samples = flags.fresh_samples ? 1 : 0;
  cfg.seed = flags.seed;
  return cfg;
}

struct LoadedDataset {
  agn_dataset* handle = nullptr;
  size_t m = 0;
  size_t n = 0;
  std::optional<std::vector<double>> truth_mean;
  std::optional<std::vector<double>> truth_cov;
  std::optional<double> truth_opnorm;

  ~LoadedDataset() { agn_dataset_free(handle); }
};

LoadedDataset load_dataset(const std::string& path) {
  LoadedDataset d;
  check(agn_dataset_load(path.c_str(), &d.handle));
  d.m = agn_dataset_rows(d.handle);
  d.n = agn_dataset_dim(d.handle);
  if (agn_dataset_has_truth(d.handle)) {
    d.truth_mean.emplace(d.n);
    check(agn_dataset_truth_mean(d.handle, d.truth_mean->data()));
    d.truth_cov.emplace(d.n * d.n);
    check(agn_dataset_truth_cov(d.handle, d.truth_cov->data()));
    double opnorm = 0.0;
    check(agn_dataset_truth_opnorm(d.handle, &opnorm));
    d.truth_opnorm = opnorm;
  }
  return d;
}

double l2_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

double frobenius_norm(const std::vector<double>& a) {
  double sum = 0.0;
  for (double x : a) sum += x * x;
  return std::sqrt(sum);
}

json base_record(const char* task, const std::string& file, const LoadedDataset& d) {
  return json{{"command", "estimate"},
              {"task", task},
              {"file", file},
              {"m", d.m},
              {"n", d.n}};
}

int run_mean(const std::string& file, const EstimateFlags& flags, bool refine) {
  LoadedDataset d = load_dataset(file);
  agn_config cfg = to_config(flags);
  std::vector<double> mean(d.n);
  int levels = 0;
  check(refine ? agn_refine_mean(d.handle, &cfg, mean.data(), &levels)
               : agn_mean(d.handle, &cfg, mean.data(), &levels));
  json record = base_record("mean", file, d);
  record["refined"] = refine;
  record["levels"] = levels;
  record["estimate"] = mean;
  if (d.truth_mean) record["error"] = l2_distance(mean, *d.truth_mean);
  emit(record);
  return 0;
}

int run_cov(const std::string& file, const EstimateFlags& flags) {
  LoadedDataset d = load_dataset(file);
  agn_config cfg = to_config(flags);
  std::vector<double> cov(d.n * d.n);
  int psd_projected = 0;
  check(agn_covariance(d.handle, &cfg, flags.psd ? 1 : 0, cov.data(), &psd_projected));
  json record = base_record("cov", file, d);
  record["psd"] = flags.psd;
  record["psd_projected"] = psd_projected != 0;
  record["frobenius_norm"] = frobenius_norm(cov);
  if (d.truth_cov) {
    std::vector<double> diff(cov.size());
    for (size_t i = 0; i < cov.size(); ++i) diff[i] = cov[i] - (*d.truth_cov)[i];
    record["error"] = frobenius_norm(diff);
  }
  emit(record);
  return 0;
}

int run_opnorm(const std::string& file, const EstimateFlags& flags, bool no_center) {
  LoadedDataset d = load_dataset(file);
  agn_config cfg = to_config(flags);
  agn_opnorm_result res;
  check(agn_opnorm(d.handle, &cfg, no_center ? 0 : 1, &res));
  json record = base_record("opnorm", file, d);
  record["lambda_hat"] = res.lambda_hat;
  record["iterations"] = res.iterations;
  record["terminated"] = res.terminated_by == 0 ? "threshold" : "cap";
  record["removed_safe"] = res.removed_safe;
  record["removed_loop"] = res.removed_loop;
  if (d.truth_opnorm && *d.truth_opnorm > 0.0) {
    record["error"] = std::fabs(res.lambda_hat - *d.truth_opnorm) / *d.truth_opnorm;
  }
  emit(record);
  return 0;
}

int run_svd(const std::string& file, const EstimateFlags& flags, std::uint64_t k) {
  LoadedDataset d = load_dataset(file);
  agn_config cfg = to_config(flags);
  std::vector<double> cov(d.n * d.n);
  check(agn_svd(d.handle, &cfg, static_cast<size_t>(k), cov.data()));
  json record = base_record("svd", file, d);
  record["k"] = k;
  record["frobenius_norm"] = frobenius_norm(cov);
  if (d.truth_cov) {
    std::vector<double> diff(cov.size());
    for (size_t i = 0; i < cov.size(); ++i) diff[i] = cov[i] - (*d.truth_cov)[i];
    record["error"] = frobenius_norm(diff);
  }
  emit(record);
  return 0;
}

int run_baselines(const std::string& file, double tol, int max_iter) {
  LoadedDataset d = load_dataset(file);
  json record = {{"command", "baselines"}, {"file", file}, {"m", d.m}, {"n", d.n}};

  std::vector<double> mean(d.n);
  check(agn_sample_mean(d.handle, mean.data()));
  json sample_mean = {{"estimate", mean}};
  if (d.truth_mean) sample_mean["error"] = l2_distance(mean, *d.truth_mean);
  record["sample_mean"] = std::move(sample_mean);

  std::vector<double> med(d.n);
  check(agn_coordinate_median(d.handle, med.data()));
  json coord_median = {{"estimate", med}};
  if (d.truth_mean) coord_median["error"] = l2_distance(med, *d.truth_mean);
  record["coordinate_median"] = std::move(coord_median);

  std::vector<double> gm(d.n);
  int iterations = 0;
  int converged = 0;
  check(agn_geometric_median(d.handle, tol, max_iter, gm.data(), &iterations, &converged));
  json geo = {{"estimate", gm}, {"iterations", iterations}, {"converged", converged != 0}};
  if (d.truth_mean) geo["error"] = l2_distance(gm, *d.truth_mean);
  record["geometric_median"] = std::move(geo);

  std::vector<double> cov(d.n * d.n);
  check(agn_sample_covariance(d.handle, nullptr, cov.data()));
  json sample_cov = {{"frobenius_norm", frobenius_norm(cov)}};
  if (d.truth_cov) {
    std::vector<double> diff(cov.size());
    for (size_t i = 0; i < cov.size(); ++i) diff[i] = cov[i] - (*d.truth_cov)[i];
    sample_cov["error"] = frobenius_norm(diff);
  }
  record["sample_covariance"] = std::move(sample_cov);

  emit(record);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust estimation of mean, covariance, and operator norm from "
               "contaminated samples"};
  app.require_subcommand(1);

  // simulate
  std::string sim_spec;
  std::string sim_out;
  std::uint64_t sim_seed = 0;
  bool sim_seed_set = false;
  CLI::App* simulate = app.add_subcommand("simulate", "generate contaminated dataset files");
  simulate->add_option("spec", sim_spec, "experiment spec (JSON)")->required();
  simulate->add_option("--out", sim_out, "output directory (overrides the spec)");
  simulate->add_option("--seed", sim_seed, "base seed (overrides the spec)")
      ->each([&](const std::string&) { sim_seed_set = true; });

  // estimate mean|cov|opnorm|svd
  CLI::App* estimate = app.add_subcommand("estimate", "run one estimator on a dataset file");
  estimate->require_subcommand(1);
  std::string est_file;
  EstimateFlags flags;
  bool refine = false;
  bool no_center = false;
  std::uint64_t svd_k = 1;

  CLI::App* est_mean = estimate->add_subcommand("mean", "robust mean");
  est_mean->add_option("dataset", est_file, "RMDS dataset file")->required();
  add_estimate_flags(est_mean, flags);
  est_mean->add_flag("--refine", refine, "gaussian-only refinement pass");

  CLI::App* est_cov = estimate->add_subcommand("cov", "robust covariance");
  est_cov->add_option("dataset", est_file, "RMDS dataset file")->required();
  add_estimate_flags(est_cov, flags);
  est_cov->add_flag("--psd,!--no-psd", flags.psd, "clamp the estimate to the PSD cone");

  CLI::App* est_opnorm = estimate->add_subcommand("opnorm", "robust top eigenvalue");
  est_opnorm->add_option("dataset", est_file, "RMDS dataset file")->required();
  add_estimate_flags(est_opnorm, flags);
  est_opnorm->add_flag("--no-center", no_center, "skip robust mean centering");

  CLI::App* est_svd = estimate->add_subcommand("svd", "rank-k robust covariance");
  est_svd->add_option("dataset", est_file, "RMDS dataset file")->required();
  add_estimate_flags(est_svd, flags);
  est_svd->add_option("--k", svd_k, "target rank");

  // bench
  std::string bench_spec;
  std::string bench_out;
  std::uint64_t bench_seed = 0;
  bool bench_seed_set = false;
  CLI::App* bench = app.add_subcommand("bench", "run an experiment grid to CSV + JSON");
  bench->add_option("spec", bench_spec, "experiment spec (JSON)")->required();
  bench->add_option("--out", bench_out, "CSV output path (overrides the spec)");
  bench->add_option("--seed", bench_seed, "base seed (overrides the spec)")
      ->each([&](const std::string&) { bench_seed_set = true; });

  // baselines
  std::string base_file;
  double base_tol = 1e-9;
  int base_max_iter = 10000;
  CLI::App* baselines = app.add_subcommand("baselines", "classical estimators on a dataset");
  baselines->add_option("dataset", base_file, "RMDS dataset file")->required();
  baselines->add_option("--tol", base_tol, "Weiszfeld stopping tolerance");
  baselines->add_option("--max-iter", base_max_iter, "Weiszfeld iteration cap");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) {
    size_t files = 0;
    check(agn_run_simulate(sim_spec.c_str(), sim_out.empty() ? nullptr : sim_out.c_str(),
                           sim_seed_set ? &sim_seed : nullptr, &files));
    emit(json{{"command", "simulate"}, {"spec", sim_spec}, {"files", files}});
    return 0;
  }
  if (estimate->parsed()) {
    if (est_mean->parsed()) return run_mean(est_file, flags, refine);
    if (est_cov->parsed()) return run_cov(est_file, flags);
    if (est_opnorm->parsed()) return run_opnorm(est_file, flags, no_center);
    return run_svd(est_file, flags, svd_k);
  }
  if (bench->parsed()) {
    int rows = 0;
    int failures = 0;
    check(agn_run_bench(bench_spec.c_str(), bench_out.empty() ? nullptr : bench_out.c_str(),
                        bench_seed_set ? &bench_seed : nullptr, &rows, &failures));
    emit(json{{"command", "bench"},
              {"spec", bench_spec},
              {"rows", rows},
              {"failures", failures}});
    return 0;
  }
  return run_baselines(base_file, base_tol, base_max_iter);
}
