#include "operator_norm.hpp"

#include <cmath>
#include <vector>

#include "outlier_removal.hpp"
#include "scalar_estimators.hpp"
#include "spectral.hpp"

namespace agnostic {

OpNormResult agnostic_opnorm(const Dataset& d, const EstimatorConfig& cfg) {
  validate_config(cfg);
  if (!(cfg.eta > 0.0)) throw ConfigError("agnostic_opnorm requires eta > 0");

  const Eigen::Index n = d.n();
  const double log_term = std::log(static_cast<double>(n) / cfg.eta);
  const double gamma = cfg.profile.gamma;
  const double slack = 1.0 + cfg.opnorm.c3 * cfg.eta * std::pow(log_term, 2.0 / gamma);
  const int cap = static_cast<int>(std::ceil(
      cfg.opnorm.max_iter_scale * static_cast<double>(n) * std::pow(log_term, 2.0 / gamma)));

  OpNormResult out;

  const RemovalResult safe = safe_outlier_truncation(d, cfg);
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < d.m(); ++i) kept += safe.weights.weights[i] > 0.0;
  if (kept == 0) throw EmptySurvivorSet("agnostic_opnorm: safe truncation removed every point");
  out.removed_per_iter.push_back(d.m() - kept);

  Matrix survivors(kept, n);
  for (Eigen::Index i = 0, r = 0; i < d.m(); ++i) {
    if (safe.weights.weights[i] > 0.0) survivors.row(r++) = d.rows().row(i);
  }

  while (true) {
    ++out.iterations;
    const Matrix second_moment =
        survivors.transpose() * survivors / static_cast<double>(survivors.rows());
    const SubspaceSplit es = eigensystem(SymMatrix{second_moment});
    const double sigma2 = es.eigenvalues[0];
    const Vector top = es.top_basis.col(0);

    const Vector proj = survivors * top;
    std::vector<double> proj_values(proj.data(), proj.data() + proj.size());
    const double var_along = var1d(proj_values, cfg).value;

    if (sigma2 <= slack * var_along) {
      out.lambda_hat = std::max(sigma2, 0.0);
      out.terminated_by = OpNormTermination::Threshold;
      return out;
    }
    if (out.iterations >= cap) {
      out.lambda_hat = std::max(sigma2, 0.0);
      out.terminated_by = OpNormTermination::IterationCap;
      return out;
    }

    const double threshold =
        cfg.opnorm.c2 * std::sqrt(var_along) * std::pow(log_term, 1.0 / gamma) / 2.0;
    Eigen::Index removed = 0;
    for (Eigen::Index i = 0; i < proj.size(); ++i) removed += std::fabs(proj[i]) > threshold;
    out.removed_per_iter.push_back(removed);

    if (removed == 0) {
      // The termination analysis guarantees progress; a stall means the
      // constants are mis-set, not a benign fixpoint.
      throw StalledProgress("agnostic_opnorm: non-terminal iteration removed no points");
    }
    if (removed == proj.size()) {
      throw EmptySurvivorSet("agnostic_opnorm: directional truncation removed every point");
    }

    Matrix next(proj.size() - removed, n);
    for (Eigen::Index i = 0, r = 0; i < proj.size(); ++i) {
      if (std::fabs(proj[i]) <= threshold) next.row(r++) = survivors.row(i);
    }
    survivors = std::move(next);
  }
}

}  // namespace agnostic
