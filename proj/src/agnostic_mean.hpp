#pragma once

#include <vector>

#include "types.hpp"

namespace agnostic {

struct LevelDiagnostic {
  Eigen::Index dim;    // working dimension at this level
  double weight_mass;  // retained weight mass / row count
  double scale2;       // damping s^2 or truncation r^2 (0 at the 1-d base)
};

struct MeanEstimate {
  Vector mean;
  int levels;  // always ceil(log2 n) + 1
  std::vector<LevelDiagnostic> diagnostics;
};

int recursion_levels(Eigen::Index n);

// Recursive mean estimation: damp or truncate outliers, estimate the mean on
// the bottom half of the principal subspace, recurse the full dataset into
// the top half. The 1-d base is the median (Gaussian mode) or the
// shortest-interval mean (bounded-moment mode).
MeanEstimate agnostic_mean(const Dataset& d, const EstimatorConfig& cfg);

// Gaussian-only accuracy refinement: inflate with isotropic noise at the
// estimated top covariance eigenvalue, whiten with the re-estimated
// covariance, estimate the mean in the whitened frame, map back.
MeanEstimate refine_mean_gaussian(const Dataset& d, const EstimatorConfig& cfg);

}  // namespace agnostic
