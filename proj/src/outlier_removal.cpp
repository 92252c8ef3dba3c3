#include "outlier_removal.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "scalar_estimators.hpp"

namespace agnostic {

namespace {

void fill_column(const Dataset& d, Eigen::Index j, std::vector<double>& buf) {
  Eigen::Map<Vector>(buf.data(), d.m()) = d.rows().col(j);
}

Vector center_gaussian(const Dataset& d) {
  Vector a(d.n());
  std::vector<double> col(d.m());
  for (Eigen::Index j = 0; j < d.n(); ++j) {
    fill_column(d, j, col);
    a[j] = median1d(col);
  }
  return a;
}

Vector center_bounded(const Dataset& d, double eta, double eps) {
  Vector a(d.n());
  std::vector<double> col(d.m());
  for (Eigen::Index j = 0; j < d.n(); ++j) {
    fill_column(d, j, col);
    a[j] = shortest_interval_mean(col, eta, eps);
  }
  return a;
}

double trace_gaussian(const Dataset& d, double eta) {
  double t = 0.0;
  std::vector<double> col(d.m());
  for (Eigen::Index j = 0; j < d.n(); ++j) {
    fill_column(d, j, col);
    t += var1d_gaussian(col, eta);
  }
  return t;
}

}  // namespace

Vector robust_center(const Dataset& d, const EstimatorConfig& cfg) {
  if (cfg.profile.mode == Mode::Gaussian) return center_gaussian(d);
  return center_bounded(d, cfg.eta, cfg.eps);
}

RemovalResult outlier_damping(const Dataset& d, const EstimatorConfig& cfg) {
  if (d.m() < 2) throw InsufficientSamples("outlier_damping: need m >= 2");
  const Vector a = center_gaussian(d);
  const double s2 = trace_gaussian(d, cfg.eta) / cfg.eps1;

  const Vector dist2 = (d.rows().rowwise() - a.transpose()).rowwise().squaredNorm();
  const double max_dist2 = dist2.maxCoeff();

  Vector w(d.m());
  if (s2 <= 1e-12 * max_dist2) {
    // Zero-spread guard: no scale to damp against.
    w.setOnes();
  } else {
    for (Eigen::Index i = 0; i < d.m(); ++i) {
      w[i] = std::max(std::exp(-dist2[i] / s2), 1e-300);
    }
  }
  return RemovalResult{WeightVector{std::move(w)}, a, s2, RemovalKind::Damping};
}

RemovalResult outlier_truncation(const Dataset& d, const EstimatorConfig& cfg) {
  const Eigen::Index k = retained_window_count(cfg.eta, cfg.eps, d.m());
  if (k < 1) throw InsufficientSamples("outlier_truncation: retained fraction below one point");
  const Vector a = center_bounded(d, cfg.eta, cfg.eps);

  const Vector dist = (d.rows().rowwise() - a.transpose()).rowwise().norm();
  std::vector<double> sorted_dist(dist.data(), dist.data() + dist.size());
  std::sort(sorted_dist.begin(), sorted_dist.end());
  const double r = sorted_dist[k - 1];

  Vector w(d.m());
  for (Eigen::Index i = 0; i < d.m(); ++i) w[i] = dist[i] <= r ? 1.0 : 0.0;
  return RemovalResult{WeightVector{std::move(w)}, a, r * r, RemovalKind::Truncation};
}

RemovalResult safe_outlier_truncation(const Dataset& d, const EstimatorConfig& cfg) {
  if (d.m() < 2) throw InsufficientSamples("safe_outlier_truncation: need m >= 2");
  if (!(cfg.eta > 0.0)) throw ConfigError("safe_outlier_truncation requires eta > 0");

  const double t = trace_estimate(d, cfg);
  const double log_term = std::log(static_cast<double>(d.n()) / cfg.eta);
  const double radius =
      cfg.opnorm.c1 * std::sqrt(t) * std::pow(log_term, 1.0 / cfg.profile.gamma);

  const Vector norm2 = d.rows().rowwise().squaredNorm();
  Vector w(d.m());
  for (Eigen::Index i = 0; i < d.m(); ++i) {
    w[i] = norm2[i] <= radius * radius ? 1.0 : 0.0;
  }
  return RemovalResult{WeightVector{std::move(w)}, Vector::Zero(d.n()), radius * radius,
                       RemovalKind::SafeTruncation};
}

}  // namespace agnostic
