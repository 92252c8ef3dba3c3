#pragma once

#include <optional>
#include <utility>

#include "outlier_removal.hpp"
#include "types.hpp"

namespace agnostic {

// Orthonormal eigenbasis split into a top-k block and its complement,
// eigenvalues in nonincreasing order.
struct SubspaceSplit {
  Matrix top_basis;     // n x k
  Matrix bottom_basis;  // n x (n-k)
  Vector eigenvalues;   // length n, nonincreasing
};

// Weighted mean and covariance, both normalized by the total weight.
std::pair<Vector, SymMatrix> weighted_covariance(const Dataset& d, const WeightVector& w);

// Full eigendecomposition with a deterministic ordering: eigenvalues
// nonincreasing (ties keep the solver's order) and each eigenvector's
// largest-magnitude entry positive (ties break to the lowest index).
SubspaceSplit eigensystem(const SymMatrix& m);

// Top-k eigenvectors vs the rest, using eigensystem's ordering.
SubspaceSplit split_top_bottom(const SymMatrix& m, Eigen::Index k);

// Frobenius-optimal symmetric rank-k truncation: keeps the k eigenvalues of
// largest magnitude.
SymMatrix best_rank_k(const SymMatrix& m, Eigen::Index k);

// Q diag(max(lambda_i, floor))^{-1/2} Q^T. floor defaults to 1e-10 * |m|_2.
SymMatrix inverse_sqrt(const SymMatrix& m, std::optional<double> floor = std::nullopt);

}  // namespace agnostic
