#include "agnostic_covariance.hpp"

#include <algorithm>
#include <cmath>

#include "spectral.hpp"

namespace agnostic {

Dataset symmetrize_pairs(const Dataset& d) {
  const Eigen::Index h = d.m() / 2;
  if (h < 1) throw InsufficientSamples("symmetrize_pairs: need m >= 2");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Matrix out = (d.rows().topRows(h) - d.rows().middleRows(h, h)) * inv_sqrt2;
  return Dataset{std::move(out)};
}

Dataset flatten_outer(const Dataset& d) {
  const Eigen::Index n = d.n();
  Matrix out(d.m(), n * n);
  for (Eigen::Index i = 0; i < d.m(); ++i) {
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        out(i, a * n + b) = d.rows()(i, a) * d.rows()(i, b);
      }
    }
  }
  return Dataset{std::move(out)};
}

CovEstimate agnostic_covariance(const Dataset& d, const EstimatorConfig& cfg, bool psd) {
  validate_config(cfg);
  if (d.m() < 4) throw InsufficientSamples("agnostic_covariance: need m >= 4");
  if (d.n() > cfg.dim_cap) {
    throw DimensionCap("agnostic_covariance: dimension exceeds the configured cap");
  }
  // Symmetrized pairs are corrupted at up to twice the input rate; the
  // doubled rate must itself stay inside the admissible range.
  if (!(2.0 * cfg.eta < 1.0 / 2.1)) {
    throw ConfigError("eta: doubled contamination rate of symmetrized pairs exceeds 1/2.1");
  }

  EstimatorConfig inner_cfg = cfg;
  inner_cfg.eta = std::min(2.0 * cfg.eta, 0.45 / 1.05);
  // Outer products of Gaussians are not Gaussian; the inner run is always
  // bounded-moment, with its fourth-moment ratio taken from c42.
  inner_cfg.profile = MomentProfile::bounded(cfg.profile.c42, cfg.profile.c42, cfg.profile.gamma);

  const Dataset flattened = flatten_outer(symmetrize_pairs(d));
  MeanEstimate inner = agnostic_mean(flattened, inner_cfg);

  const Eigen::Index n = d.n();
  Matrix raw(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      raw(a, b) = inner.mean[a * n + b];
    }
  }
  SymMatrix sigma{std::move(raw)};

  if (psd) {
    const SubspaceSplit es = eigensystem(sigma);
    Matrix projected = es.top_basis *
                       es.eigenvalues.cwiseMax(0.0).asDiagonal() *
                       es.top_basis.transpose();
    sigma = SymMatrix{std::move(projected)};
  }
  return CovEstimate{std::move(sigma), psd, std::move(inner)};
}

SymMatrix agnostic_svd(const Dataset& d, Eigen::Index k, const EstimatorConfig& cfg) {
  if (k < 0 || k > d.n()) throw ConfigError("agnostic_svd: k must lie in [0, n]");
  return best_rank_k(agnostic_covariance(d, cfg).sigma_hat, k);
}

}  // namespace agnostic
