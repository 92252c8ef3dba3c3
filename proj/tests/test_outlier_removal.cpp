#include <algorithm>
#include <cmath>
#include <vector>

#include "contamination.hpp"
#include "doctest.h"
#include "outlier_removal.hpp"
#include "rng.hpp"
#include "scalar_estimators.hpp"

using namespace agnostic;

TEST_CASE("robust center is the coordinatewise median in Gaussian mode") {
  Matrix rows(3, 2);
  rows << 0, 0, 1, 1, 2, 2;
  EstimatorConfig cfg;
  Vector c = robust_center(Dataset(rows), cfg);
  CHECK(c(0) == 1.0);
  CHECK(c(1) == 1.0);

  Matrix one(1, 3);
  one << 4, 5, 6;
  Vector r = robust_center(Dataset(one), cfg);
  CHECK(r(0) == 4.0);
  CHECK(r(1) == 5.0);
  CHECK(r(2) == 6.0);
}

TEST_CASE("robust center shrugs off a 10 percent point mass") {
  Vector loc = Vector::Zero(16);
  loc(0) = 100.0;
  GaussianFamily fam{Vector::Zero(16), Matrix::Identity(16, 16)};
  auto ld = sample_contaminated(fam, PointMass{loc}, 0.1, 20000, 9);
  EstimatorConfig cfg;
  cfg.eta = 0.1;
  CHECK(robust_center(ld.data, cfg).norm() <= 0.5);
}

TEST_CASE("robust center uses shortest-interval means in bounded mode") {
  Matrix rows(4, 1);
  rows << 0, 0, 2, 2;
  EstimatorConfig cfg;
  cfg.eta = 0.0;
  cfg.eps = 0.05;
  cfg.profile = MomentProfile::bounded(4.0, 20.0, 2.0);
  // eps small enough that the window is all four points.
  CHECK(robust_center(Dataset(rows), cfg)(0) == 1.0);
}

TEST_CASE("damping weights follow the exponential formula") {
  // Coordinate medians are 0 exactly; each coordinate's spread estimate is 1,
  // so s^2 = 2 / eps1 = 20.
  Matrix rows(9, 2);
  const double c = std::sqrt(20.0);
  rows << 0, 0, 1, 0, -1, 0, 0, 1, 0, -1, 0, 1, 0, -1, c, 0, -c, 0;
  EstimatorConfig cfg;
  auto res = outlier_damping(Dataset(rows), cfg);

  CHECK(res.kind == RemovalKind::Damping);
  CHECK(res.center.norm() == 0.0);
  CHECK(res.scale2 == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(res.weights.weights(0) == 1.0);  // at the center
  CHECK(res.weights.weights(7) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(res.weights.weights(8) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double w = res.weights.weights(i);
    CHECK(w > 0.0);
    CHECK(w <= 1.0);
    const double d2 = (rows.row(i).transpose() - res.center).squaredNorm();
    CHECK(w == doctest::Approx(std::exp(-d2 / res.scale2)).epsilon(1e-12));
  }
}

TEST_CASE("damping keeps all weights at 1 for zero spread") {
  Matrix rows = Matrix::Constant(5, 3, 2.5);
  EstimatorConfig cfg;
  auto res = outlier_damping(Dataset(rows), cfg);
  CHECK(res.weights.weights.minCoeff() == 1.0);
  CHECK_THROWS_AS(outlier_damping(Dataset(Matrix::Zero(1, 2)), cfg), InsufficientSamples);
}

TEST_CASE("damping is translation equivariant and rotation insensitive") {
  GaussianFamily fam{Vector::Zero(4), Matrix::Identity(4, 4)};
  auto ld = sample_contaminated(fam, PointMass{Vector::Zero(4)}, 0.0, 20000, 21);
  EstimatorConfig cfg;
  auto base = outlier_damping(ld.data, cfg);

  Vector t(4);
  t << 4, -3, 2, 1;
  Dataset shifted(ld.data.rows().rowwise() + t.transpose());
  auto res = outlier_damping(shifted, cfg);
  CHECK((res.center - (base.center + t)).norm() <= 1e-9);
  CHECK((res.weights.weights - base.weights.weights).cwiseAbs().maxCoeff() <= 1e-9);

  // Rotation about the center changes the per-coordinate statistics only by
  // sampling noise, so weights move very little.
  Matrix q(4, 4);
  q << 0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0;
  Matrix rotated = (ld.data.rows().rowwise() - base.center.transpose()) * q.transpose();
  auto rot = outlier_damping(Dataset(rotated.rowwise() + base.center.transpose()), cfg);
  CHECK((rot.weights.weights - base.weights.weights).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("truncation retains the k nearest points") {
  // 100 points on a line with distinct gaps; eta = eps = 0.1 keeps k = 72.
  Matrix rows(100, 1);
  for (int i = 0; i < 100; ++i) rows(i, 0) = i * (1.0 + 0.001 * i);
  EstimatorConfig cfg;
  cfg.eta = 0.1;
  cfg.eps = 0.1;
  cfg.profile = MomentProfile::bounded(4.0, 20.0, 2.0);
  auto res = outlier_truncation(Dataset(rows), cfg);

  CHECK(res.kind == RemovalKind::Truncation);
  const Vector dist = (rows.rowwise() - res.center.transpose()).rowwise().norm();
  std::vector<double> sorted_dist(dist.data(), dist.data() + dist.size());
  std::sort(sorted_dist.begin(), sorted_dist.end());
  const double r = sorted_dist[71];
  CHECK(res.scale2 == doctest::Approx(r * r).epsilon(1e-12));
  int retained = 0;
  for (Eigen::Index i = 0; i < 100; ++i) {
    const bool in_ball = dist(i) <= r;
    CHECK(res.weights.weights(i) == (in_ball ? 1.0 : 0.0));
    retained += in_ball;
  }
  CHECK(retained == 72);
}

TEST_CASE("truncation keeps every tied point at the radius") {
  // Eight rows at the origin pin the per-coordinate center at exactly zero;
  // the four cross arms all sit at distance exactly 2. k = 9 of 12, so the
  // radius lands on the arms and the tie keeps all four.
  Matrix rows = Matrix::Zero(12, 2);
  rows(8, 0) = 2.0;
  rows(9, 0) = -2.0;
  rows(10, 1) = 2.0;
  rows(11, 1) = -2.0;
  EstimatorConfig cfg;
  cfg.eta = 0.1;
  cfg.eps = 0.1;
  cfg.profile = MomentProfile::bounded(4.0, 20.0, 2.0);
  CHECK(retained_window_count(0.1, 0.1, 12) == 9);
  auto res = outlier_truncation(Dataset(rows), cfg);
  CHECK(res.center.norm() == 0.0);
  CHECK(res.scale2 == 4.0);
  CHECK(res.weights.weights.minCoeff() == 1.0);
  CHECK(res.weights.weights.sum() == 12.0);
}

TEST_CASE("truncation zeroes a distant adversary") {
  UniformBallFamily fam{1.0, 4};
  Vector loc = Vector::Zero(4);
  loc(0) = 1e6;
  auto ld = sample_contaminated(fam, PointMass{loc}, 0.05, 20000, 11);
  EstimatorConfig cfg;
  cfg.eta = 0.05;
  cfg.eps = 0.05;
  cfg.profile = MomentProfile::bounded(4.0, 20.0, 2.0);
  auto res = outlier_truncation(ld.data, cfg);
  for (Eigen::Index i = 0; i < ld.data.m(); ++i) {
    if (ld.labels[static_cast<std::size_t>(i)]) {
      CHECK(res.weights.weights(i) == 0.0);
    }
  }
}

TEST_CASE("truncation is translation equivariant") {
  UniformBallFamily fam{1.0, 3};
  auto ld = sample_contaminated(fam, PointMass{Vector::Zero(3)}, 0.0, 500, 27);
  EstimatorConfig cfg;
  cfg.eta = 0.05;
  cfg.eps = 0.1;
  cfg.profile = MomentProfile::bounded(4.0, 20.0, 2.0);
  auto base = outlier_truncation(ld.data, cfg);
  Vector t(3);
  t << -7, 2, 9;
  auto res = outlier_truncation(Dataset(ld.data.rows().rowwise() + t.transpose()), cfg);
  CHECK((res.center - (base.center + t)).norm() <= 1e-9);
  CHECK((res.weights.weights - base.weights.weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("safe truncation radius formula and origin center") {
  // Medians 0, per-coordinate spread estimate exactly 1: t = 2, and with
  // n=2, eta=0.1, gamma=2 the radius is c1 * sqrt(2 ln 20).
  Matrix rows(9, 2);
  rows << 0, 0, 1, 0, -1, 0, 0, 1, 0, -1, 0, 1, 0, -1, 3, 0, -3, 0;
  EstimatorConfig cfg;
  cfg.eta = 0.1;
  auto res = safe_outlier_truncation(Dataset(rows), cfg);
  CHECK(res.kind == RemovalKind::SafeTruncation);
  CHECK(res.center.norm() == 0.0);
  CHECK(res.scale2 ==
        doctest::Approx(16.0 * 2.0 * std::log(2.0 / 0.1)).epsilon(1e-12));
  CHECK(res.weights.weights.minCoeff() == 1.0);  // all rows well inside
}

TEST_CASE("safe truncation requires eta > 0 and removes almost nothing clean") {
  EstimatorConfig cfg;
  cfg.eta = 0.0;
  Matrix rows = Matrix::Random(10, 2);
  CHECK_THROWS_AS(safe_outlier_truncation(Dataset(rows), cfg), ConfigError);

  GaussianFamily fam{Vector::Zero(8), Matrix::Identity(8, 8)};
  auto ld = sample_contaminated(fam, PointMass{Vector::Zero(8)}, 0.0, 20000, 13);
  cfg.eta = 0.05;
  auto res = safe_outlier_truncation(ld.data, cfg);
  const double removed =
      1.0 - res.weights.weights.sum() / static_cast<double>(ld.data.m());
  CHECK(removed <= 0.01);
}
