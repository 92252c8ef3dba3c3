#pragma once

#include <cstdint>
#include <variant>

#include "types.hpp"

namespace agnostic {

// ---- clean families ----

struct GaussianFamily {
  Vector mean;
  Matrix covariance;  // symmetric PSD
};

struct BernoulliProductFamily {
  Vector p;       // per-coordinate success probabilities
  bool centered;  // subtract p from every row
};

struct UniformBallFamily {
  double radius;
  Eigen::Index n;
};

struct TwoPointFamily {
  double sigma;  // mass 1/2 each at -sigma and +sigma on the first coordinate
  Eigen::Index n = 1;
};

struct StudentTFamily {
  double dof;  // must exceed 4
  double scale;
  Eigen::Index n;
};

using CleanFamily = std::variant<GaussianFamily, BernoulliProductFamily, UniformBallFamily,
                                 TwoPointFamily, StudentTFamily>;

// ---- adversary strategies ----

struct PointMass {
  Vector location;
};

struct AxisPair {
  Eigen::Index axis;
  double distance;  // corrupted rows alternate +distance and -distance
};

struct ThreePointTail {
  double sigma;
  double eta;  // the atom sits at sigma / eta^{1/4}
};

// Corrupted rows follow the positive part of the density gap between two
// Gaussians, so the mixture is indistinguishable from the second Gaussian
// contaminated the opposite way. 1-d construction on the first coordinate.
struct GaussianTVSwap {
  double mu1;
  double mu2;
  double sigma;
};

struct GeomMedianKiller {
  double distance;  // all corrupted rows at distance * e1
};

using AdversaryStrategy =
    std::variant<PointMass, AxisPair, ThreePointTail, GaussianTVSwap, GeomMedianKiller>;

enum class Placement { ExactCount, Bernoulli };

// Draws m rows: clean ones iid from the family, corrupted ones from the
// strategy. ExactCount corrupts exactly floor(eta * m) rows at shuffled
// positions; Bernoulli corrupts each row independently with probability eta.
LabeledDataset sample_contaminated(const CleanFamily& family, const AdversaryStrategy& adv,
                                   double eta, Eigen::Index m, std::uint64_t seed,
                                   Placement placement = Placement::ExactCount);

// Hard instance for the geometric median: clean rows have zero variance along
// e1 and unit variance elsewhere; corrupted rows sit at n * e1.
LabeledDataset geom_median_instance(Eigen::Index n, double eta, Eigen::Index m,
                                    std::uint64_t seed);

// Mean gap that makes the density-gap adversary exactly total-variation
// feasible at rate eta: delta = 2 sigma Phi^{-1}((1 + eta/(1-eta)) / 2).
double tv_swap_delta(double eta, double sigma);
GaussianTVSwap make_tv_swap(double mu1, double sigma, double eta);

double normal_pdf(double x, double mu, double sigma);
double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace agnostic
