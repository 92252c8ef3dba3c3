#pragma once

#include <vector>

#include "types.hpp"

namespace agnostic {

struct WeiszfeldState {
  Vector iterate;
  double objective = 0.0;  // sum over rows of ||iterate - x_i||
  int iterations = 0;
  bool converged = false;
};

Vector sample_mean(const Dataset& d);

struct SampleMoments {
  Vector mean;
  SymMatrix covariance;  // population convention, divisor m
};

SampleMoments sample_covariance(const Dataset& d);

Vector coordinate_median(const Dataset& d);

// Weiszfeld fixed-point iteration for the geometric median, started from the
// coordinate-wise median. Stops when the step norm drops to tol * (1 + ||y||)
// or after max_iter updates; non-convergence is reported, not thrown. If
// objective_trace is given it receives the objective after every iterate
// including the start.
WeiszfeldState geometric_median(const Dataset& d, double tol = 1e-9, int max_iter = 10000,
                                std::vector<double>* objective_trace = nullptr);

}  // namespace agnostic
