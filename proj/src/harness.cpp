#include "harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "agnostic_covariance.hpp"
#include "agnostic_mean.hpp"
#include "baselines.hpp"
#include "dataset_io.hpp"
#include "errors.hpp"
#include "operator_norm.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace agnostic {
namespace {

using nlohmann::json;

constexpr std::uint64_t kEstimatorSeedTag = 0x65737473656564ULL;

const std::set<std::string>& known_estimators() {
  static const std::set<std::string> names = {
      "agnostic_mean",       "refine_mean",       "sample_mean",
      "coordinate_median",   "geometric_median",  "agnostic_covariance",
      "sample_covariance",   "agnostic_opnorm",   "agnostic_svd"};
  return names;
}

[[noreturn]] void spec_fail(const std::string& message) { throw SpecError(message); }

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) spec_fail(where + ": expected a JSON object");
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      spec_fail(where + ": unknown key '" + item.key() + "'");
    }
  }
}

double get_double(const json& j, const char* key, std::optional<double> fallback,
                  const std::string& where) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    spec_fail(where + "." + key + ": required");
  }
  const json& v = j.at(key);
  if (!v.is_number()) spec_fail(where + "." + key + ": expected a number");
  return v.get<double>();
}

bool get_bool(const json& j, const char* key, bool fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) spec_fail(where + "." + key + ": expected a boolean");
  return v.get<bool>();
}

std::string get_string(const json& j, const char* key, std::optional<std::string> fallback,
                       const std::string& where) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    spec_fail(where + "." + key + ": required");
  }
  const json& v = j.at(key);
  if (!v.is_string()) spec_fail(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> get_double_list(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) spec_fail(where + "." + key + ": required");
  const json& v = j.at(key);
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) spec_fail(where + "." + key + ": expected numbers");
      out.push_back(e.get<double>());
    }
  } else {
    spec_fail(where + "." + key + ": expected a number or array of numbers");
  }
  if (out.empty()) spec_fail(where + "." + key + ": must be nonempty");
  return out;
}

std::optional<std::vector<double>> get_optional_vector(const json& j, const char* key,
                                                       const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  const json& v = j.at(key);
  if (!v.is_array()) spec_fail(where + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) spec_fail(where + "." + key + ": expected numbers");
    out.push_back(e.get<double>());
  }
  if (out.empty()) spec_fail(where + "." + key + ": must be nonempty");
  return out;
}

std::vector<Eigen::Index> to_index_list(const std::vector<double>& values, const char* key,
                                        const std::string& where) {
  std::vector<Eigen::Index> out;
  for (double v : values) {
    double r = std::round(v);
    if (!(r >= 1.0) || std::fabs(v - r) > 1e-9 || r > 1e12) {
      spec_fail(where + "." + std::string(key) + ": entries must be positive integers");
    }
    out.push_back(static_cast<Eigen::Index>(r));
  }
  return out;
}

FamilySpec parse_family(const json& j) {
  require_object(j, "family");
  FamilySpec f;
  f.kind = get_string(j, "kind", std::nullopt, "family");
  if (f.kind == "gaussian") {
    reject_unknown_keys(j, {"kind", "mean_fill", "mean", "cov"}, "family");
    f.mean_fill = get_double(j, "mean_fill", 0.0, "family");
    f.mean = get_optional_vector(j, "mean", "family");
    if (j.contains("cov")) {
      const json& c = j.at("cov");
      require_object(c, "family.cov");
      f.cov_kind = get_string(c, "kind", std::nullopt, "family.cov");
      if (f.cov_kind == "identity") {
        reject_unknown_keys(c, {"kind"}, "family.cov");
      } else if (f.cov_kind == "scaled_identity") {
        reject_unknown_keys(c, {"kind", "value"}, "family.cov");
        f.cov_value = get_double(c, "value", std::nullopt, "family.cov");
      } else if (f.cov_kind == "diag_first") {
        reject_unknown_keys(c, {"kind", "first", "rest"}, "family.cov");
        f.cov_first = get_double(c, "first", std::nullopt, "family.cov");
        f.cov_rest = get_double(c, "rest", 1.0, "family.cov");
      } else if (f.cov_kind == "diag") {
        reject_unknown_keys(c, {"kind", "values"}, "family.cov");
        f.cov_diag = get_optional_vector(c, "values", "family.cov");
        if (!f.cov_diag) spec_fail("family.cov.values: required");
      } else {
        spec_fail("family.cov.kind: unknown kind '" + f.cov_kind + "'");
      }
    }
  } else if (f.kind == "bernoulli_product") {
    reject_unknown_keys(j, {"kind", "p_fill", "p", "centered"}, "family");
    f.p_fill = get_double(j, "p_fill", 0.5, "family");
    f.p = get_optional_vector(j, "p", "family");
    f.centered = get_bool(j, "centered", true, "family");
  } else if (f.kind == "uniform_ball") {
    reject_unknown_keys(j, {"kind", "radius"}, "family");
    f.radius = get_double(j, "radius", std::nullopt, "family");
  } else if (f.kind == "two_point") {
    reject_unknown_keys(j, {"kind", "sigma"}, "family");
    f.sigma = get_double(j, "sigma", std::nullopt, "family");
  } else if (f.kind == "student_t") {
    reject_unknown_keys(j, {"kind", "dof", "scale"}, "family");
    f.dof = get_double(j, "dof", std::nullopt, "family");
    f.scale = get_double(j, "scale", 1.0, "family");
  } else if (f.kind == "geom_median_instance") {
    reject_unknown_keys(j, {"kind"}, "family");
  } else {
    spec_fail("family.kind: unknown kind '" + f.kind + "'");
  }
  return f;
}

AdversarySpec parse_adversary(const json& j) {
  require_object(j, "adversary");
  AdversarySpec a;
  a.kind = get_string(j, "kind", std::nullopt, "adversary");
  if (a.kind == "none") {
    reject_unknown_keys(j, {"kind"}, "adversary");
  } else if (a.kind == "point_mass") {
    reject_unknown_keys(j, {"kind", "fill", "location", "axis", "distance", "scale_with"},
                        "adversary");
    if (j.contains("fill")) a.fill = get_double(j, "fill", std::nullopt, "adversary");
    a.location = get_optional_vector(j, "location", "adversary");
    if (j.contains("distance")) {
      a.distance = get_double(j, "distance", std::nullopt, "adversary");
      a.axis = static_cast<Eigen::Index>(get_double(j, "axis", 0.0, "adversary"));
      a.scale_with = get_string(j, "scale_with", std::string("none"), "adversary");
    }
    int forms = (a.fill ? 1 : 0) + (a.location ? 1 : 0) + (j.contains("distance") ? 1 : 0);
    if (forms != 1) {
      spec_fail("adversary: point_mass needs exactly one of fill, location, distance");
    }
  } else if (a.kind == "axis_pair") {
    reject_unknown_keys(j, {"kind", "axis", "distance", "scale_with"}, "adversary");
    a.axis = static_cast<Eigen::Index>(get_double(j, "axis", 0.0, "adversary"));
    a.distance = get_double(j, "distance", std::nullopt, "adversary");
    a.scale_with = get_string(j, "scale_with", std::string("none"), "adversary");
  } else if (a.kind == "three_point_tail") {
    reject_unknown_keys(j, {"kind", "sigma"}, "adversary");
    a.sigma = get_double(j, "sigma", std::nullopt, "adversary");
  } else if (a.kind == "tv_swap") {
    reject_unknown_keys(j, {"kind", "mu1", "mu2", "sigma"}, "adversary");
    a.mu1 = get_double(j, "mu1", 0.0, "adversary");
    if (j.contains("mu2")) a.mu2 = get_double(j, "mu2", std::nullopt, "adversary");
    a.sigma = get_double(j, "sigma", std::nullopt, "adversary");
  } else if (a.kind == "geom_median_killer") {
    reject_unknown_keys(j, {"kind", "distance", "scale_with"}, "adversary");
    a.distance = get_double(j, "distance", std::nullopt, "adversary");
    a.scale_with = get_string(j, "scale_with", std::string("none"), "adversary");
  } else {
    spec_fail("adversary.kind: unknown kind '" + a.kind + "'");
  }
  if (a.scale_with != "none" && a.scale_with != "sqrt_n" && a.scale_with != "n") {
    spec_fail("adversary.scale_with: expected none, sqrt_n, or n");
  }
  return a;
}

double scale_multiplier(const std::string& scale_with, Eigen::Index n) {
  if (scale_with == "sqrt_n") return std::sqrt(static_cast<double>(n));
  if (scale_with == "n") return static_cast<double>(n);
  return 1.0;
}

}  // namespace

ExperimentSpec parse_spec(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    spec_fail(origin + ": " + e.what());
  }
  require_object(j, origin);
  reject_unknown_keys(j,
                      {"family", "adversary", "grid", "estimators", "repeats", "seed", "out",
                       "placement", "mode", "config"},
                      origin);

  ExperimentSpec spec;
  if (!j.contains("family")) spec_fail("family: required");
  spec.family = parse_family(j.at("family"));
  if (j.contains("adversary")) spec.adversary = parse_adversary(j.at("adversary"));

  if (!j.contains("grid")) spec_fail("grid: required");
  const json& grid = j.at("grid");
  require_object(grid, "grid");
  reject_unknown_keys(grid, {"n", "m", "eta", "eps"}, "grid");
  spec.n_grid = to_index_list(get_double_list(grid, "n", "grid"), "n", "grid");
  spec.m_grid = to_index_list(get_double_list(grid, "m", "grid"), "m", "grid");
  spec.eta_grid = get_double_list(grid, "eta", "grid");
  spec.eps_grid = get_double_list(grid, "eps", "grid");
  for (double eta : spec.eta_grid) {
    if (!(eta >= 0.0) || !(eta < 1.0)) spec_fail("eta: must lie in [0, 1)");
  }
  for (double eps : spec.eps_grid) {
    if (!(eps > 0.0) || !(eps < 1.0)) spec_fail("eps: must lie in (0, 1)");
  }

  if (j.contains("estimators")) {
    const json& est = j.at("estimators");
    if (!est.is_array()) spec_fail("estimators: expected an array of strings");
    for (const auto& e : est) {
      if (!e.is_string()) spec_fail("estimators: expected strings");
      std::string name = e.get<std::string>();
      if (!known_estimators().count(name)) {
        spec_fail("estimators: unknown estimator '" + name + "'");
      }
      spec.estimators.push_back(std::move(name));
    }
  }

  double repeats = get_double(j, "repeats", 1.0, origin);
  if (!(repeats >= 1.0) || std::fabs(repeats - std::round(repeats)) > 1e-9) {
    spec_fail("repeats: must be a positive integer");
  }
  spec.repeats = static_cast<int>(std::round(repeats));

  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned()) spec_fail("seed: expected an unsigned integer");
    spec.seed = s.get<std::uint64_t>();
  }

  spec.out = get_string(j, "out", std::string(""), origin);

  std::string placement = get_string(j, "placement", std::string("exact"), origin);
  if (placement == "exact") {
    spec.placement = Placement::ExactCount;
  } else if (placement == "bernoulli") {
    spec.placement = Placement::Bernoulli;
  } else {
    spec_fail("placement: expected exact or bernoulli");
  }

  std::string mode = get_string(j, "mode", std::string("gaussian"), origin);
  if (mode == "gaussian") {
    spec.mode = Mode::Gaussian;
  } else if (mode == "bounded") {
    spec.mode = Mode::BoundedMoment;
  } else {
    spec_fail("mode: expected gaussian or bounded");
  }

  if (j.contains("config")) {
    const json& c = j.at("config");
    require_object(c, "config");
    reject_unknown_keys(c, {"c4", "c42", "gamma", "eps1", "fresh_samples", "psd", "svd_rank"},
                        "config");
    spec.c4 = get_double(c, "c4", spec.c4, "config");
    spec.c42 = get_double(c, "c42", spec.c42, "config");
    spec.gamma = get_double(c, "gamma", spec.gamma, "config");
    spec.eps1 = get_double(c, "eps1", spec.eps1, "config");
    spec.fresh_samples = get_bool(c, "fresh_samples", spec.fresh_samples, "config");
    spec.psd = get_bool(c, "psd", spec.psd, "config");
    double rank = get_double(c, "svd_rank", 1.0, "config");
    if (!(rank >= 0.0) || std::fabs(rank - std::round(rank)) > 1e-9) {
      spec_fail("config.svd_rank: must be a nonnegative integer");
    }
    spec.svd_rank = static_cast<int>(std::round(rank));
  }

  bool any_eta_positive = false;
  for (double eta : spec.eta_grid) any_eta_positive = any_eta_positive || eta > 0.0;
  if (spec.family.kind == "geom_median_instance") {
    if (spec.adversary.kind != "none") {
      spec_fail("adversary: geom_median_instance carries its own adversary; use kind none");
    }
  } else if (any_eta_positive && spec.adversary.kind == "none") {
    spec_fail("adversary: required when any grid eta is positive");
  }
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open spec file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_spec(buffer.str(), path);
}

CleanFamily instantiate_family(const FamilySpec& spec, Eigen::Index n) {
  if (spec.kind == "gaussian") {
    Vector mean;
    if (spec.mean) {
      if (static_cast<Eigen::Index>(spec.mean->size()) != n) {
        spec_fail("family.mean: length must equal the grid dimension");
      }
      mean = Eigen::Map<const Vector>(spec.mean->data(), n);
    } else {
      mean = Vector::Constant(n, spec.mean_fill);
    }
    Matrix cov;
    if (spec.cov_kind == "identity") {
      cov = Matrix::Identity(n, n);
    } else if (spec.cov_kind == "scaled_identity") {
      cov = Matrix::Identity(n, n) * spec.cov_value;
    } else if (spec.cov_kind == "diag_first") {
      cov = Matrix::Identity(n, n) * spec.cov_rest;
      cov(0, 0) = spec.cov_first;
    } else {
      if (static_cast<Eigen::Index>(spec.cov_diag->size()) != n) {
        spec_fail("family.cov.values: length must equal the grid dimension");
      }
      cov = Matrix::Zero(n, n);
      cov.diagonal() = Eigen::Map<const Vector>(spec.cov_diag->data(), n);
    }
    return GaussianFamily{std::move(mean), std::move(cov)};
  }
  if (spec.kind == "bernoulli_product") {
    Vector p;
    if (spec.p) {
      if (static_cast<Eigen::Index>(spec.p->size()) != n) {
        spec_fail("family.p: length must equal the grid dimension");
      }
      p = Eigen::Map<const Vector>(spec.p->data(), n);
    } else {
      p = Vector::Constant(n, spec.p_fill);
    }
    return BernoulliProductFamily{std::move(p), spec.centered};
  }
  if (spec.kind == "uniform_ball") return UniformBallFamily{spec.radius, n};
  if (spec.kind == "two_point") return TwoPointFamily{spec.sigma, n};
  if (spec.kind == "student_t") return StudentTFamily{spec.dof, spec.scale, n};
  spec_fail("family.kind: '" + spec.kind + "' cannot be instantiated directly");
}

AdversaryStrategy instantiate_adversary(const AdversarySpec& spec, Eigen::Index n, double eta) {
  // With no corrupted rows the strategy is never sampled; a zero point mass
  // keeps downstream validation trivially satisfied.
  if (eta <= 0.0 || spec.kind == "none") {
    return PointMass{Vector::Zero(n)};
  }
  if (spec.kind == "point_mass") {
    if (spec.fill) return PointMass{Vector::Constant(n, *spec.fill)};
    if (spec.location) {
      if (static_cast<Eigen::Index>(spec.location->size()) != n) {
        spec_fail("adversary.location: length must equal the grid dimension");
      }
      return PointMass{Eigen::Map<const Vector>(spec.location->data(), n)};
    }
    Vector loc = Vector::Zero(n);
    if (spec.axis < 0 || spec.axis >= n) spec_fail("adversary.axis: out of range");
    loc[spec.axis] = spec.distance * scale_multiplier(spec.scale_with, n);
    return PointMass{std::move(loc)};
  }
  if (spec.kind == "axis_pair") {
    return AxisPair{spec.axis, spec.distance * scale_multiplier(spec.scale_with, n)};
  }
  if (spec.kind == "three_point_tail") {
    return ThreePointTail{spec.sigma, eta};
  }
  if (spec.kind == "tv_swap") {
    if (spec.mu2) return GaussianTVSwap{spec.mu1, *spec.mu2, spec.sigma};
    return make_tv_swap(spec.mu1, spec.sigma, eta);
  }
  if (spec.kind == "geom_median_killer") {
    return GeomMedianKiller{spec.distance * scale_multiplier(spec.scale_with, n)};
  }
  spec_fail("adversary.kind: unknown kind '" + spec.kind + "'");
}

std::vector<GridCell> grid_cells(const ExperimentSpec& spec) {
  std::vector<GridCell> cells;
  std::size_t index = 0;
  for (Eigen::Index n : spec.n_grid) {
    for (Eigen::Index m : spec.m_grid) {
      for (double eta : spec.eta_grid) {
        for (double eps : spec.eps_grid) {
          cells.push_back(GridCell{n, m, eta, eps, index++});
        }
      }
    }
  }
  return cells;
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t cell_index, int repeat) {
  return derive_seed(base, {static_cast<std::uint64_t>(cell_index),
                            static_cast<std::uint64_t>(repeat)});
}

LabeledDataset realize_cell(const ExperimentSpec& spec, const GridCell& cell, int repeat) {
  std::uint64_t seed = trial_seed(spec.seed, cell.index, repeat);
  if (spec.family.kind == "geom_median_instance") {
    return geom_median_instance(cell.n, cell.eta, cell.m, seed);
  }
  CleanFamily family = instantiate_family(spec.family, cell.n);
  AdversaryStrategy adv = instantiate_adversary(spec.adversary, cell.n, cell.eta);
  return sample_contaminated(family, adv, cell.eta, cell.m, seed, spec.placement);
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) {
    throw SpecError("format_double: value does not fit the buffer");
  }
  return std::string(buf, ptr);
}

std::vector<std::string> run_simulate(const ExperimentSpec& spec, const std::string& out_dir) {
  if (out_dir.empty()) spec_fail("out: required for simulate");
  std::error_code fs_err;
  std::filesystem::create_directories(out_dir, fs_err);
  if (fs_err) {
    throw IoError("cannot create output directory: " + out_dir);
  }
  std::vector<std::string> paths;
  for (const GridCell& cell : grid_cells(spec)) {
    for (int rep = 0; rep < spec.repeats; ++rep) {
      LabeledDataset data = realize_cell(spec, cell, rep);
      std::string name = "sim_c" + std::to_string(cell.index) + "_n" + std::to_string(cell.n) +
                         "_m" + std::to_string(cell.m) + "_eta" + format_double(cell.eta) +
                         "_eps" + format_double(cell.eps) + "_r" + std::to_string(rep) + "_s" +
                         std::to_string(trial_seed(spec.seed, cell.index, rep)) + ".rmds";
      std::string path = (std::filesystem::path(out_dir) / name).string();
      save_rmds(path, data);
      paths.push_back(std::move(path));
    }
  }
  return paths;
}

namespace {

struct TrialOutcome {
  double error = std::numeric_limits<double>::quiet_NaN();
  std::string diagnostics;
  bool failed = false;
};

double frobenius_error(const SymMatrix& estimate, const SymMatrix& truth) {
  return (estimate.mat() - truth.mat()).norm();
}

double truth_opnorm(const GroundTruth& truth) {
  SubspaceSplit es = eigensystem(truth.covariance);
  return es.eigenvalues.cwiseAbs().maxCoeff();
}

TrialOutcome run_estimator(const std::string& name, const LabeledDataset& data,
                           const EstimatorConfig& cfg, const ExperimentSpec& spec) {
  TrialOutcome out;
  const GroundTruth& truth = data.truth;
  if (name == "agnostic_mean") {
    MeanEstimate est = agnostic_mean(data.data, cfg);
    out.error = (est.mean - truth.mean).norm();
    out.diagnostics = "levels=" + std::to_string(est.levels);
  } else if (name == "refine_mean") {
    MeanEstimate est = refine_mean_gaussian(data.data, cfg);
    out.error = (est.mean - truth.mean).norm();
    out.diagnostics = "levels=" + std::to_string(est.levels);
  } else if (name == "sample_mean") {
    out.error = (sample_mean(data.data) - truth.mean).norm();
  } else if (name == "coordinate_median") {
    out.error = (coordinate_median(data.data) - truth.mean).norm();
  } else if (name == "geometric_median") {
    WeiszfeldState state = geometric_median(data.data);
    out.error = (state.iterate - truth.mean).norm();
    out.diagnostics = "iterations=" + std::to_string(state.iterations) +
                      ";converged=" + (state.converged ? "1" : "0");
  } else if (name == "agnostic_covariance") {
    CovEstimate est = agnostic_covariance(data.data, cfg, spec.psd);
    out.error = frobenius_error(est.sigma_hat, truth.covariance);
    out.diagnostics = "levels=" + std::to_string(est.inner.levels) +
                      ";psd_projected=" + (est.psd_projected ? "1" : "0");
  } else if (name == "sample_covariance") {
    SampleMoments moments = sample_covariance(data.data);
    out.error = frobenius_error(moments.covariance, truth.covariance);
  } else if (name == "agnostic_svd") {
    SymMatrix est = agnostic_svd(data.data, spec.svd_rank, cfg);
    out.error = frobenius_error(est, truth.covariance);
    out.diagnostics = "rank=" + std::to_string(spec.svd_rank);
  } else if (name == "agnostic_opnorm") {
    // The removal loop assumes mean-zero data, so center on the robust mean.
    MeanEstimate center = agnostic_mean(data.data, cfg);
    Matrix rows = data.data.rows().rowwise() - center.mean.transpose();
    OpNormResult res = agnostic_opnorm(Dataset(std::move(rows)), cfg);
    double truth_norm = truth_opnorm(truth);
    out.error = std::fabs(res.lambda_hat - truth_norm) / truth_norm;
    Eigen::Index safe_removed = res.removed_per_iter.empty() ? 0 : res.removed_per_iter[0];
    Eigen::Index loop_removed = 0;
    for (std::size_t i = 1; i < res.removed_per_iter.size(); ++i) {
      loop_removed += res.removed_per_iter[i];
    }
    out.diagnostics =
        "iterations=" + std::to_string(res.iterations) +
        ";safe_removed=" + std::to_string(safe_removed) +
        ";loop_removed=" + std::to_string(loop_removed) + ";terminated=" +
        (res.terminated_by == OpNormTermination::Threshold ? "threshold" : "cap");
  } else {
    spec_fail("estimators: unknown estimator '" + name + "'");
  }
  return out;
}

struct TrialRow {
  GridCell cell;
  std::size_t estimator_pos;
  std::string estimator;
  int repeat;
  std::uint64_t seed;
  TrialOutcome outcome;
  double seconds;
};

std::string error_code_label(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config: return "config";
    case ErrorCode::InsufficientSamples: return "insufficient_samples";
    case ErrorCode::EmptyInput: return "empty_input";
    case ErrorCode::ZeroWeightMass: return "zero_weight_mass";
    case ErrorCode::ConvergenceFailure: return "convergence_failure";
    case ErrorCode::SingularMatrix: return "singular_matrix";
    case ErrorCode::DegradedRegime: return "degraded_regime";
    case ErrorCode::DimensionCap: return "dimension_cap";
    case ErrorCode::EmptySurvivorSet: return "empty_survivor_set";
    case ErrorCode::StalledProgress: return "stalled_progress";
    case ErrorCode::Io: return "io";
    case ErrorCode::Spec: return "spec";
  }
  return "unknown";
}

// Aggregate conventions: median averages the two middle order statistics on
// even counts; quartiles use the nearest-rank rule.
double sorted_median(const std::vector<double>& sorted) {
  std::size_t len = sorted.size();
  if (len % 2 == 1) return sorted[len / 2];
  return 0.5 * (sorted[len / 2 - 1] + sorted[len / 2]);
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  auto len = static_cast<double>(sorted.size());
  auto idx = static_cast<std::size_t>(std::ceil(q * len - 1e-9 * std::max(1.0, q * len)));
  if (idx < 1) idx = 1;
  if (idx > sorted.size()) idx = sorted.size();
  return sorted[idx - 1];
}

}  // namespace

BenchResult run_bench(const ExperimentSpec& spec, const std::string& out_csv) {
  if (out_csv.empty()) spec_fail("out: required for bench");
  if (spec.estimators.empty()) spec_fail("estimators: must be nonempty for bench");

  std::vector<TrialRow> rows;
  for (const GridCell& cell : grid_cells(spec)) {
    for (int rep = 0; rep < spec.repeats; ++rep) {
      std::uint64_t seed = trial_seed(spec.seed, cell.index, rep);
      LabeledDataset data = realize_cell(spec, cell, rep);

      EstimatorConfig cfg;
      cfg.eta = cell.eta;
      cfg.eps = cell.eps;
      cfg.profile = spec.mode == Mode::Gaussian
                        ? MomentProfile::gaussian()
                        : MomentProfile::bounded(spec.c4, spec.c42, spec.gamma);
      cfg.eps1 = spec.eps1;
      cfg.fresh_samples = spec.fresh_samples;
      cfg.seed = derive_seed(seed, {kEstimatorSeedTag});

      for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
        TrialRow row{cell, e, spec.estimators[e], rep, seed, TrialOutcome{}, 0.0};
        auto start = std::chrono::steady_clock::now();
        try {
          row.outcome = run_estimator(spec.estimators[e], data, cfg, spec);
        } catch (const Error& err) {
          row.outcome.failed = true;
          row.outcome.diagnostics = "status=error;code=" + error_code_label(err.code());
        } catch (const std::exception&) {
          row.outcome.failed = true;
          row.outcome.diagnostics = "status=error;code=internal";
        }
        std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        row.seconds = elapsed.count();
        rows.push_back(std::move(row));
      }
    }
  }

  std::stable_sort(rows.begin(), rows.end(), [](const TrialRow& a, const TrialRow& b) {
    if (a.cell.index != b.cell.index) return a.cell.index < b.cell.index;
    if (a.estimator_pos != b.estimator_pos) return a.estimator_pos < b.estimator_pos;
    return a.repeat < b.repeat;
  });

  std::filesystem::path csv_path(out_csv);
  if (csv_path.has_parent_path()) {
    std::error_code fs_err;
    std::filesystem::create_directories(csv_path.parent_path(), fs_err);
    if (fs_err) {
      throw IoError("cannot create output directory: " + csv_path.parent_path().string());
    }
  }
  std::ofstream csv(out_csv, std::ios::trunc);
  if (!csv) {
    throw IoError("cannot open for writing: " + out_csv);
  }
  csv << "n,m,eta,eps,estimator,repeat,seed,error,seconds,diagnostics\n";
  int failures = 0;
  for (const TrialRow& row : rows) {
    if (row.outcome.failed) ++failures;
    csv << row.cell.n << ',' << row.cell.m << ',' << format_double(row.cell.eta) << ','
        << format_double(row.cell.eps) << ',' << row.estimator << ',' << row.repeat << ','
        << row.seed << ',' << format_double(row.outcome.error) << ','
        << format_double(row.seconds) << ',' << row.outcome.diagnostics << '\n';
  }
  if (!csv.good()) {
    throw IoError("write failed: " + out_csv);
  }
  csv.close();

  // Aggregate per cell and estimator over the successful repeats.
  json cells = json::array();
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    std::vector<double> errors;
    int cell_failures = 0;
    while (j < rows.size() && rows[j].cell.index == rows[i].cell.index &&
           rows[j].estimator_pos == rows[i].estimator_pos) {
      if (rows[j].outcome.failed || std::isnan(rows[j].outcome.error)) {
        ++cell_failures;
      } else {
        errors.push_back(rows[j].outcome.error);
      }
      ++j;
    }
    json entry = {
        {"n", rows[i].cell.n},
        {"m", rows[i].cell.m},
        {"eta", rows[i].cell.eta},
        {"eps", rows[i].cell.eps},
        {"estimator", rows[i].estimator},
        {"repeats", static_cast<int>(j - i)},
        {"failures", cell_failures},
    };
    if (!errors.empty()) {
      std::sort(errors.begin(), errors.end());
      double q25 = sorted_quantile(errors, 0.25);
      double q75 = sorted_quantile(errors, 0.75);
      entry["median"] = sorted_median(errors);
      entry["q25"] = q25;
      entry["q75"] = q75;
      entry["iqr"] = q75 - q25;
    } else {
      entry["median"] = nullptr;
      entry["q25"] = nullptr;
      entry["q75"] = nullptr;
      entry["iqr"] = nullptr;
    }
    cells.push_back(std::move(entry));
    i = j;
  }

  std::string json_path = out_csv;
  if (json_path.size() >= 4 && json_path.substr(json_path.size() - 4) == ".csv") {
    json_path = json_path.substr(0, json_path.size() - 4);
  }
  json_path += ".json";
  std::ofstream agg(json_path, std::ios::trunc);
  if (!agg) {
    throw IoError("cannot open for writing: " + json_path);
  }
  agg << json{{"cells", std::move(cells)}}.dump(2) << '\n';
  if (!agg.good()) {
    throw IoError("write failed: " + json_path);
  }

  return BenchResult{out_csv, json_path, static_cast<int>(rows.size()), failures};
}

}  // namespace agnostic
