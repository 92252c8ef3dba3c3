#pragma once

#include <span>

#include "types.hpp"

namespace agnostic {

struct ScalarEstimate {
  double value;
  const char* method;
};

// Middle order statistic; even lengths average the middle pair.
double median1d(std::span<const double> values);

// Mean of the minimum-width sorted window holding a (1-eta-eps)(1-eta)
// fraction of the points. Width ties resolve to the smallest left endpoint.
double shortest_interval_mean(std::span<const double> values, double eta, double eps);

// Quantile spread estimate: (q(0.8413) - median)^2, clamped at 0.
double var1d_gaussian(std::span<const double> values, double eta);

// Robust mean of squared deviations around the shortest-interval mean.
double var1d_general(std::span<const double> values, double eta, double eps);

// Mode dispatch for the 1-d variance estimators.
ScalarEstimate var1d(std::span<const double> values, const EstimatorConfig& cfg);

// Sum of per-coordinate 1-d variance estimates.
double trace_estimate(const Dataset& d, const EstimatorConfig& cfg);

// k = ceil((1-eta-eps)(1-eta) * len) with a snap against float fuzz, so the
// count matches exact arithmetic on representable parameters.
Eigen::Index retained_window_count(double eta, double eps, Eigen::Index len);

}  // namespace agnostic
