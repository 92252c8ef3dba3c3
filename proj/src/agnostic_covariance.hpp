#pragma once

#include "agnostic_mean.hpp"
#include "types.hpp"

namespace agnostic {

struct CovEstimate {
  SymMatrix sigma_hat;
  bool psd_projected;
  MeanEstimate inner;  // diagnostics of the n^2-dimensional mean run
};

// Pairs rows (x_i - x_{i + floor(m/2)}) / sqrt(2), dropping an odd trailing
// row: cancels the unknown mean while keeping the covariance.
Dataset symmetrize_pairs(const Dataset& d);

// Maps each row x to the row-major flattening of x x^T (length n^2).
Dataset flatten_outer(const Dataset& d);

// Covariance as the agnostic mean of flattened outer products of the
// symmetrized pairs, run in bounded-moment mode at twice the contamination
// rate. Result is symmetrized; psd=true additionally clamps negative
// eigenvalues at zero.
CovEstimate agnostic_covariance(const Dataset& d, const EstimatorConfig& cfg, bool psd = false);

// Frobenius-optimal rank-k truncation of the covariance estimate.
SymMatrix agnostic_svd(const Dataset& d, Eigen::Index k, const EstimatorConfig& cfg);

}  // namespace agnostic
