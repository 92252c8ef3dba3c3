#include "agnostic_mean.hpp"

#include <cmath>
#include <vector>

#include "agnostic_covariance.hpp"
#include "outlier_removal.hpp"
#include "rng.hpp"
#include "scalar_estimators.hpp"
#include "spectral.hpp"

namespace agnostic {

namespace {

constexpr std::uint64_t kRefineNoiseTag = 0x726566696e65ULL;

struct Recursion {
  const EstimatorConfig& cfg;
  std::vector<LevelDiagnostic>& diagnostics;

  // `chunks[0]` is this level's working data; later entries are consumed one
  // per deeper level when sample splitting is on. Without splitting the
  // vector holds a single matrix reused at every level.
  Vector run(std::vector<Matrix> chunks) {
    const Eigen::Index n = chunks.front().cols();
    const Dataset cur{Matrix(chunks.front())};

    if (n == 1) {
      std::vector<double> values(cur.rows().data(), cur.rows().data() + cur.m());
      double est;
      double mass = 1.0;
      if (cfg.profile.mode == Mode::Gaussian) {
        est = median1d(values);
      } else {
        est = shortest_interval_mean(values, cfg.eta, cfg.eps);
        mass = static_cast<double>(retained_window_count(cfg.eta, cfg.eps, cur.m())) /
               static_cast<double>(cur.m());
      }
      diagnostics.push_back({1, mass, 0.0});
      return Vector::Constant(1, est);
    }

    const RemovalResult removal = cfg.profile.mode == Mode::Gaussian
                                      ? outlier_damping(cur, cfg)
                                      : outlier_truncation(cur, cfg);
    auto [mean_w, cov] = weighted_covariance(cur, removal.weights);
    const Eigen::Index k = (n + 1) / 2;
    const SubspaceSplit split = split_top_bottom(cov, k);

    diagnostics.push_back(
        {n, removal.weights.weights.sum() / static_cast<double>(cur.m()), removal.scale2});

    const Vector mu_bottom = split.bottom_basis.transpose() * mean_w;

    // The recursion always re-projects the full working set, not the
    // truncated one; removal is redone fresh at the next level.
    std::vector<Matrix> next;
    if (chunks.size() > 1) {
      next.reserve(chunks.size() - 1);
      for (std::size_t i = 1; i < chunks.size(); ++i) {
        next.push_back(chunks[i] * split.top_basis);
      }
    } else {
      next.push_back(chunks.front() * split.top_basis);
    }
    const Vector mu_top = run(std::move(next));

    return split.top_basis * mu_top + split.bottom_basis * mu_bottom;
  }
};

}  // namespace

int recursion_levels(Eigen::Index n) {
  int ceil_log2 = 0;
  Eigen::Index reach = 1;
  while (reach < n) {
    reach *= 2;
    ++ceil_log2;
  }
  return ceil_log2 + 1;
}

MeanEstimate agnostic_mean(const Dataset& d, const EstimatorConfig& cfg) {
  validate_config(cfg);
  const int levels = recursion_levels(d.n());

  std::vector<Matrix> chunks;
  if (cfg.fresh_samples) {
    if (d.m() < 4 * static_cast<Eigen::Index>(levels)) {
      throw InsufficientSamples("agnostic_mean: fresh_samples needs m >= 4 * levels");
    }
    for (const Dataset& c : split_dataset(d, levels)) chunks.push_back(c.rows());
  } else {
    chunks.push_back(d.rows());
  }

  MeanEstimate out;
  out.levels = levels;
  Recursion rec{cfg, out.diagnostics};
  out.mean = rec.run(std::move(chunks));
  return out;
}

MeanEstimate refine_mean_gaussian(const Dataset& d, const EstimatorConfig& cfg) {
  validate_config(cfg);
  if (cfg.profile.mode != Mode::Gaussian) {
    throw ConfigError("refine_mean_gaussian requires the Gaussian profile");
  }
  const double eta_log_n = cfg.eta * std::log(static_cast<double>(d.n()));
  if (!(eta_log_n < cfg.refine_max_eta_log_n)) {
    throw DegradedRegime("refine_mean_gaussian: eta * ln(n) exceeds the refinement regime");
  }

  // Noise scale from the top eigenvalue of a first-pass covariance estimate.
  const CovEstimate first = agnostic_covariance(d, cfg, false);
  const Vector lam0 = eigensystem(first.sigma_hat).eigenvalues;
  const double sigma2 = std::max(lam0.size() > 0 ? lam0[0] : 0.0, 0.0);
  const double sigma = std::sqrt(sigma2);

  Matrix inflated = d.rows();
  for (Eigen::Index i = 0; i < inflated.rows(); ++i) {
    Rng row_rng(derive_seed(cfg.seed, {kRefineNoiseTag, static_cast<std::uint64_t>(i)}));
    for (Eigen::Index j = 0; j < inflated.cols(); ++j) {
      inflated(i, j) += sigma * row_rng.normal();
    }
  }
  const Dataset dp{std::move(inflated)};

  const CovEstimate second = agnostic_covariance(dp, cfg, true);
  const SubspaceSplit es = eigensystem(second.sigma_hat);
  const double top = es.eigenvalues.cwiseAbs().maxCoeff();
  if (top == 0.0) {
    // Nothing to whiten against; the inflated data is already degenerate.
    return agnostic_mean(dp, cfg);
  }

  const SymMatrix whitener = inverse_sqrt(second.sigma_hat);
  const Dataset whitened{Matrix(dp.rows() * whitener.mat())};
  MeanEstimate inner = agnostic_mean(whitened, cfg);

  Vector sqrt_scale(es.eigenvalues.size());
  for (Eigen::Index i = 0; i < sqrt_scale.size(); ++i) {
    sqrt_scale[i] = std::sqrt(std::max(es.eigenvalues[i], 0.0));
  }
  const Matrix sqrt_cov = es.top_basis * sqrt_scale.asDiagonal() * es.top_basis.transpose();

  inner.mean = sqrt_cov * inner.mean;
  return inner;
}

}  // namespace agnostic
