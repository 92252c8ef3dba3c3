#pragma once

#include <vector>

#include "types.hpp"

namespace agnostic {

enum class OpNormTermination { Threshold, IterationCap };

struct OpNormResult {
  double lambda_hat = 0.0;
  int iterations = 0;
  // [0] holds the pre-loop safe-truncation count; entries 1.. are the
  // per-iteration directional removals.
  std::vector<Eigen::Index> removed_per_iter;
  OpNormTermination terminated_by = OpNormTermination::Threshold;
};

// Top-eigenvalue estimation on pre-centered data: truncate to a safe ball,
// then repeatedly compare the top eigenvalue of the uncentered second moment
// against a robust 1-d variance along the top eigenvector, removing the
// points that stick out until the two agree.
OpNormResult agnostic_opnorm(const Dataset& d, const EstimatorConfig& cfg);

}  // namespace agnostic
