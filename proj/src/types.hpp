#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "sym_matrix.hpp"

namespace agnostic {

// m samples in R^n, one sample per row. Entries must be finite and the row
// order is part of the value: identical construction iterates identically.
class Dataset {
 public:
  explicit Dataset(Matrix rows);

  Eigen::Index m() const { return rows_.rows(); }
  Eigen::Index n() const { return rows_.cols(); }
  const Matrix& rows() const { return rows_; }

 private:
  Matrix rows_;
};

enum class Mode { Gaussian, BoundedMoment };

struct MomentProfile {
  Mode mode = Mode::Gaussian;
  double c4 = 3.0;     // fourth-moment ratio of the samples
  double c42 = 15.0;   // fourth-moment ratio of squared deviations
  double gamma = 2.0;  // tail exponent used by the operator-norm radius

  // Gaussian mode pins c4 = 3 and gamma = 2.
  static MomentProfile gaussian() { return MomentProfile{}; }
  static MomentProfile bounded(double c4, double c42, double gamma) {
    return MomentProfile{Mode::BoundedMoment, c4, c42, gamma};
  }
};

struct OpNormConfig {
  double c1 = 4.0;              // safe-truncation radius constant
  double c2 = 4.0;              // per-direction truncation constant
  double c3 = 8.0;              // termination slack constant
  double max_iter_scale = 4.0;  // iteration cap multiplier
};

struct EstimatorConfig {
  double eta = 0.05;  // contamination fraction, [0, 1/2.1)
  double eps = 0.05;  // statistical slack, (0, 1)
  MomentProfile profile{};
  double eps1 = 0.1;  // damping scale constant, (0, 1]
  bool fresh_samples = false;
  OpNormConfig opnorm{};
  std::uint64_t seed = 0;
  int dim_cap = 96;                     // covariance recursion works in n^2 dims
  double refine_max_eta_log_n = 0.2;    // refinement regime bound on eta*ln(n)
};

// Throws ConfigError naming the first violated field.
void validate_config(const EstimatorConfig& cfg);

struct GroundTruth {
  Vector mean;
  SymMatrix covariance;
  std::string family;
};

struct LabeledDataset {
  Dataset data;
  std::vector<std::uint8_t> labels;  // 1 = corrupted
  GroundTruth truth;

  LabeledDataset(Dataset d, std::vector<std::uint8_t> l, GroundTruth t);
  Eigen::Index corrupted_count() const;
};

// `levels` disjoint contiguous chunks of near-equal size; sizes differ by at
// most one with the remainder going to the earliest chunks.
std::vector<Dataset> split_dataset(const Dataset& d, int levels);

}  // namespace agnostic
