#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace agnostic {

std::pair<Vector, SymMatrix> weighted_covariance(const Dataset& d, const WeightVector& w) {
  if (w.weights.size() != d.m()) {
    throw ConfigError("weighted_covariance: weight count must equal row count");
  }
  const double total = w.weights.sum();
  if (!(total > 0.0)) throw ZeroWeightMass("weighted_covariance: total weight is not positive");

  const Vector mean = (d.rows().transpose() * w.weights) / total;
  const Matrix centered = d.rows().rowwise() - mean.transpose();
  const Matrix weighted = centered.array().colwise() * w.weights.array();
  Matrix cov = (weighted.transpose() * centered) / total;
  return {mean, SymMatrix(std::move(cov))};
}

SubspaceSplit eigensystem(const SymMatrix& m) {
  const Eigen::Index n = m.n();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.mat());
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("eigensystem: eigensolver did not converge");
  }
  const Vector& lam_asc = solver.eigenvalues();
  const Matrix& q_asc = solver.eigenvectors();

  // Nonincreasing order; stable so equal eigenvalues keep the solver order.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return lam_asc[a] > lam_asc[b]; });

  Vector lam(n);
  Matrix q(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    lam[c] = lam_asc[order[c]];
    q.col(c) = q_asc.col(order[c]);
    // Sign convention: the largest-magnitude entry is positive.
    Eigen::Index arg = 0;
    double best = std::fabs(q(0, c));
    for (Eigen::Index r = 1; r < n; ++r) {
      const double v = std::fabs(q(r, c));
      if (v > best) {
        best = v;
        arg = r;
      }
    }
    if (q(arg, c) < 0.0) q.col(c) = -q.col(c);
  }
  return SubspaceSplit{std::move(q), Matrix(n, 0), std::move(lam)};
}

SubspaceSplit split_top_bottom(const SymMatrix& m, Eigen::Index k) {
  if (k < 1 || k > m.n()) throw ConfigError("split_top_bottom: k must lie in [1, n]");
  SubspaceSplit full = eigensystem(m);
  SubspaceSplit out;
  out.eigenvalues = std::move(full.eigenvalues);
  out.top_basis = full.top_basis.leftCols(k);
  out.bottom_basis = full.top_basis.rightCols(m.n() - k);
  return out;
}

SymMatrix best_rank_k(const SymMatrix& m, Eigen::Index k) {
  if (k < 0 || k > m.n()) throw ConfigError("best_rank_k: k must lie in [0, n]");
  if (k == 0) return SymMatrix::zero(m.n());
  const SubspaceSplit es = eigensystem(m);

  // Keep by magnitude: estimated covariances can carry small negative
  // eigenvalues, and Frobenius optimality ranks by |lambda|.
  std::vector<Eigen::Index> order(m.n());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::fabs(es.eigenvalues[a]) > std::fabs(es.eigenvalues[b]);
  });

  Matrix out = Matrix::Zero(m.n(), m.n());
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index c = order[i];
    out += es.eigenvalues[c] * es.top_basis.col(c) * es.top_basis.col(c).transpose();
  }
  return SymMatrix(std::move(out));
}

SymMatrix inverse_sqrt(const SymMatrix& m, std::optional<double> floor) {
  const SubspaceSplit es = eigensystem(m);
  const double norm2 = es.eigenvalues.size() > 0 ? es.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  if (norm2 == 0.0) throw SingularMatrix("inverse_sqrt: zero matrix");
  const double f = floor.value_or(1e-10 * norm2);
  if (!(f > 0.0)) throw ConfigError("inverse_sqrt: floor must be positive");

  Vector scale(m.n());
  for (Eigen::Index i = 0; i < m.n(); ++i) {
    scale[i] = 1.0 / std::sqrt(std::max(es.eigenvalues[i], f));
  }
  Matrix out = es.top_basis * scale.asDiagonal() * es.top_basis.transpose();
  return SymMatrix(std::move(out));
}

}  // namespace agnostic
