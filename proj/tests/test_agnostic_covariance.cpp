#include <cmath>

#include "agnostic_covariance.hpp"
#include "contamination.hpp"
#include "doctest.h"
#include "spectral.hpp"

using namespace agnostic;

TEST_CASE("symmetrize_pairs differences and odd-row rule") {
  Matrix same(2, 3);
  same << 1, 2, 3, 1, 2, 3;
  auto z = symmetrize_pairs(Dataset(same));
  CHECK(z.m() == 1);
  CHECK(z.rows().norm() == 0.0);

  Matrix pair(2, 1);
  pair << 2, 0;
  auto s = symmetrize_pairs(Dataset(pair));
  CHECK(s.rows()(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  Matrix five(5, 2);
  five << 1, 0, 2, 0, 3, 0, 4, 0, 99, 99;
  auto two = symmetrize_pairs(Dataset(five));
  CHECK(two.m() == 2);
  // Rows pair with the offset floor(5/2) = 2: (r0 - r2), (r1 - r3); r4 drops.
  CHECK(two.rows()(0, 0) == doctest::Approx(-2.0 / std::sqrt(2.0)));
  CHECK(two.rows()(1, 0) == doctest::Approx(-2.0 / std::sqrt(2.0)));

  Matrix one(1, 2);
  one << 1, 2;
  CHECK_THROWS_AS(symmetrize_pairs(Dataset(one)), InsufficientSamples);
}

TEST_CASE("flatten_outer lays out x x^T row-major") {
  Matrix rows(3, 2);
  rows << 1, 2, 0, 0, 3, -1;
  auto flat = flatten_outer(Dataset(rows));
  CHECK(flat.n() == 4);
  CHECK(flat.rows()(0, 0) == 1.0);
  CHECK(flat.rows()(0, 1) == 2.0);
  CHECK(flat.rows()(0, 2) == 2.0);
  CHECK(flat.rows()(0, 3) == 4.0);
  CHECK(flat.rows().row(1).norm() == 0.0);

  Matrix e1(1, 3);
  e1 << 1, 0, 0;
  auto f = flatten_outer(Dataset(e1));
  CHECK(f.rows()(0, 0) == 1.0);
  CHECK(f.rows().row(0).sum() == 1.0);

  // Entry (a, b) of the outer product sits at column a*n + b.
  for (Eigen::Index a = 0; a < 2; ++a)
    for (Eigen::Index b = 0; b < 2; ++b)
      CHECK(flat.rows()(2, a * 2 + b) == rows(2, a) * rows(2, b));
}

TEST_CASE("identical rows give a zero covariance estimate") {
  Matrix rows = Vector::LinSpaced(3, 1.0, 3.0).transpose().replicate(64, 1);
  EstimatorConfig cfg;
  cfg.eta = 0.05;
  auto est = agnostic_covariance(Dataset(rows), cfg);
  CHECK(est.sigma_hat.mat().norm() == 0.0);
  CHECK_FALSE(est.psd_projected);
}

TEST_CASE("recovers a diagonal covariance under a far point mass") {
  Matrix cov = Matrix::Zero(2, 2);
  cov.diagonal() << 4, 1;
  GaussianFamily fam{Vector::Zero(2), cov};
  auto ld = sample_contaminated(fam, PointMass{Vector::Constant(2, 50.0)}, 0.02, 100000, 37);
  EstimatorConfig cfg;
  cfg.eta = 0.02;
  cfg.eps = 0.05;
  auto est = agnostic_covariance(ld.data, cfg);
  CHECK((est.sigma_hat.mat() - cov).norm() <= 1.6);
}

TEST_CASE("clean isotropic covariance is tight") {
  GaussianFamily fam{Vector::Zero(4), Matrix::Identity(4, 4)};
  auto ld = sample_contaminated(fam, PointMass{Vector::Zero(4)}, 0.0, 100000, 41);
  EstimatorConfig cfg;
  cfg.eta = 0.0;
  cfg.eps = 0.01;  // slack drives the truncation window; keep it tight when clean
  auto est = agnostic_covariance(ld.data, cfg);
  CHECK((est.sigma_hat.mat() - Matrix::Identity(4, 4)).norm() <= 0.15);
}

TEST_CASE("doubled contamination rate must stay admissible") {
  Matrix rows = Matrix::Random(100, 2);
  EstimatorConfig cfg;
  cfg.eta = 0.24;  // valid alone, but 0.48 >= 1/2.1 after doubling
  CHECK_THROWS_AS(agnostic_covariance(Dataset(rows), cfg), ConfigError);
  Matrix three(3, 2);
  three << 1, 2, 3, 4, 5, 6;
  cfg.eta = 0.05;
  CHECK_THROWS_AS(agnostic_covariance(Dataset(three), cfg), InsufficientSamples);
}

TEST_CASE("dimension cap bounds the input dimension") {
  // The cap is on n itself; the recursion then works in n^2 dimensions.
  Matrix rows = Matrix::Random(50, 10);
  EstimatorConfig cfg;
  cfg.dim_cap = 9;
  CHECK_THROWS_AS(agnostic_covariance(Dataset(rows), cfg), DimensionCap);
  cfg.dim_cap = 10;
  CHECK_NOTHROW(agnostic_covariance(Dataset(rows), cfg));
}

TEST_CASE("psd projection clamps negative eigenvalues") {
  GaussianFamily fam{Vector::Zero(3), Matrix::Identity(3, 3)};
  auto ld = sample_contaminated(fam, PointMass{Vector::Constant(3, 9.0)}, 0.05, 400, 53);
  EstimatorConfig cfg;
  cfg.eta = 0.05;
  auto est = agnostic_covariance(ld.data, cfg, true);
  CHECK(est.psd_projected);
  CHECK(eigensystem(est.sigma_hat).eigenvalues.minCoeff() >= 0.0);
}

TEST_CASE("shift invariance and scale equivariance") {
  GaussianFamily fam{Vector::Zero(3), Matrix::Identity(3, 3)};
  auto ld = sample_contaminated(fam, PointMass{Vector::Constant(3, 25.0)}, 0.04, 4000, 59);
  EstimatorConfig cfg;
  cfg.eta = 0.04;
  cfg.eps = 0.05;
  Matrix base = agnostic_covariance(ld.data, cfg).sigma_hat.mat();

  Vector t(3);
  t << 50, -20, 5;
  Matrix shifted =
      agnostic_covariance(Dataset(ld.data.rows().rowwise() + t.transpose()), cfg)
          .sigma_hat.mat();
  CHECK((shifted - base).norm() <= 1e-8 * (1.0 + base.norm()));

  Matrix scaled = agnostic_covariance(Dataset(Matrix(3.0 * ld.data.rows())), cfg)
                      .sigma_hat.mat();
  CHECK((scaled - 9.0 * base).norm() <= 1e-6 * (1.0 + 9.0 * base.norm()));
}

TEST_CASE("rank-k truncation of the covariance estimate") {
  Matrix cov = Matrix::Identity(4, 4);
  cov(0, 0) = 9.0;
  GaussianFamily fam{Vector::Zero(4), cov};
  auto ld = sample_contaminated(fam, PointMass{Vector::Constant(4, 50.0)}, 0.02, 100000, 43);
  EstimatorConfig cfg;
  cfg.eta = 0.02;
  cfg.eps = 0.05;

  // Best rank-1 proxy of the truth loses the sqrt(3) identity tail; the
  // estimate may add at most a constant on this instance.
  SymMatrix s1 = agnostic_svd(ld.data, 1, cfg);
  CHECK((cov - s1.mat()).norm() <= std::sqrt(3.0) + 3.0);

  SymMatrix full = agnostic_svd(ld.data, 4, cfg);
  Matrix direct = agnostic_covariance(ld.data, cfg).sigma_hat.mat();
  CHECK((full.mat() - direct).norm() <= 1e-9 * (1.0 + direct.norm()));

  CHECK(agnostic_svd(ld.data, 0, cfg).mat().norm() == 0.0);
  CHECK_THROWS_AS(agnostic_svd(ld.data, 5, cfg), ConfigError);
}
