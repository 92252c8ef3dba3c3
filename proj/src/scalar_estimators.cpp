#include "scalar_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace agnostic {

namespace {

std::vector<double> sorted(std::span<const double> values) {
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  return s;
}

Eigen::Index snapped_ceil(double x) {
  return static_cast<Eigen::Index>(std::ceil(x - 1e-9 * std::max(1.0, std::fabs(x))));
}

// Nearest-rank quantile: 1-based index ceil(p * len) of the sorted values.
double quantile_nearest_rank(const std::vector<double>& s, double p) {
  Eigen::Index idx = snapped_ceil(p * static_cast<double>(s.size()));
  idx = std::clamp<Eigen::Index>(idx, 1, static_cast<Eigen::Index>(s.size()));
  return s[idx - 1];
}

}  // namespace

Eigen::Index retained_window_count(double eta, double eps, Eigen::Index len) {
  const double frac = (1.0 - eta - eps) * (1.0 - eta);
  return snapped_ceil(frac * static_cast<double>(len));
}

double median1d(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("median1d: empty input");
  std::vector<double> s = sorted(values);
  const std::size_t n = s.size();
  if (n % 2 == 1) return s[n / 2];
  return 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

double shortest_interval_mean(std::span<const double> values, double eta, double eps) {
  if (values.empty()) throw EmptyInput("shortest_interval_mean: empty input");
  const Eigen::Index len = static_cast<Eigen::Index>(values.size());
  const Eigen::Index k = retained_window_count(eta, eps, len);
  if (k < 1) {
    throw InsufficientSamples("shortest_interval_mean: retained fraction below one point");
  }
  std::vector<double> s = sorted(values);
  // Prefix sums give each window mean in O(1).
  std::vector<double> prefix(s.size() + 1, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) prefix[i + 1] = prefix[i] + s[i];

  Eigen::Index best = 0;
  double best_width = s[k - 1] - s[0];
  for (Eigen::Index i = 1; i + k <= len; ++i) {
    const double width = s[i + k - 1] - s[i];
    if (width < best_width) {
      best_width = width;
      best = i;
    }
  }
  return (prefix[best + k] - prefix[best]) / static_cast<double>(k);
}

double var1d_gaussian(std::span<const double> values, double /*eta*/) {
  if (values.size() < 2) throw InsufficientSamples("var1d_gaussian: need len >= 2");
  std::vector<double> s = sorted(values);
  const std::size_t n = s.size();
  const double med = (n % 2 == 1) ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
  const double sd = quantile_nearest_rank(s, 0.8413) - med;
  return sd > 0.0 ? sd * sd : 0.0;
}

double var1d_general(std::span<const double> values, double eta, double eps) {
  if (values.size() < 2) throw InsufficientSamples("var1d_general: need len >= 2");
  const double mu = shortest_interval_mean(values, eta, eps);
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mu;
    sq[i] = d * d;
  }
  return std::max(shortest_interval_mean(sq, eta, eps), 0.0);
}

ScalarEstimate var1d(std::span<const double> values, const EstimatorConfig& cfg) {
  if (cfg.profile.mode == Mode::Gaussian) {
    return {var1d_gaussian(values, cfg.eta), "var1d_gaussian"};
  }
  return {var1d_general(values, cfg.eta, cfg.eps), "var1d_general"};
}

double trace_estimate(const Dataset& d, const EstimatorConfig& cfg) {
  if (d.m() < 2) throw InsufficientSamples("trace_estimate: need m >= 2");
  double total = 0.0;
  std::vector<double> col(d.m());
  for (Eigen::Index j = 0; j < d.n(); ++j) {
    Eigen::Map<Vector>(col.data(), d.m()) = d.rows().col(j);
    total += var1d(col, cfg).value;
  }
  return total;
}

}  // namespace agnostic
