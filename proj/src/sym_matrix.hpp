#pragma once

#include <Eigen/Dense>
#include <utility>

namespace agnostic {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Square matrix kept symmetric by construction: M <- (M + M^T)/2.
class SymMatrix {
 public:
  explicit SymMatrix(Matrix m) : mat_(0.5 * (m + m.transpose())) {}

  static SymMatrix zero(Eigen::Index n) { return SymMatrix(Matrix::Zero(n, n)); }
  static SymMatrix identity(Eigen::Index n) { return SymMatrix(Matrix::Identity(n, n)); }

  Eigen::Index n() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }

 private:
  Matrix mat_;
};

}  // namespace agnostic
