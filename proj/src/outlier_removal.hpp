#pragma once

#include "types.hpp"

namespace agnostic {

enum class RemovalKind { Damping, Truncation, SafeTruncation };

// Per-sample weights: (0, 1] for damping, {0, 1} for truncation.
struct WeightVector {
  Vector weights;
};

struct RemovalResult {
  WeightVector weights;
  Vector center;
  double scale2;  // s^2 for damping, r^2 for truncation, R^2 for safe truncation
  RemovalKind kind;
};

// Coordinate-wise median (Gaussian mode) or shortest-interval mean
// (bounded-moment mode).
Vector robust_center(const Dataset& d, const EstimatorConfig& cfg);

// Gaussian-mode removal: w_i = exp(-|x_i - a|^2 / s^2) around the coordinate
// median a with s^2 = trace_estimate / eps1. Callers handle n = 1 themselves;
// requires m >= 2. Zero-spread inputs keep every weight at 1.
RemovalResult outlier_damping(const Dataset& d, const EstimatorConfig& cfg);

// Bounded-moment removal: unit weight inside the smallest ball around the
// robust center holding a (1-eta-eps)(1-eta) fraction of the points.
// Distance ties at the radius are all retained.
RemovalResult outlier_truncation(const Dataset& d, const EstimatorConfig& cfg);

// Origin-centered truncation at radius c1 * sqrt(trace) * ln(n/eta)^{1/gamma}.
// The input must already be centered.
RemovalResult safe_outlier_truncation(const Dataset& d, const EstimatorConfig& cfg);

}  // namespace agnostic
