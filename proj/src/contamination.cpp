#include "contamination.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "errors.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace agnostic {
namespace {

constexpr std::uint64_t kPlacementTag = 0x706c6163656d6e74ULL;
constexpr std::uint64_t kCleanTag = 0x636c65616e726f77ULL;
constexpr std::uint64_t kAdvTag = 0x6164767273726f77ULL;

// Rejection attempts per corrupted draw; the acceptance rate is
// eta / (1 - eta), so this covers eta down to ~1e-4 with huge margin.
constexpr int kSwapAttemptCap = 1000000;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

// Counts snap to the nearest integer within 1e-9 relative tolerance before
// flooring, so eta * m written in decimal yields the intended count.
Eigen::Index snapped_floor(double x) {
  return static_cast<Eigen::Index>(std::floor(x + 1e-9 * std::max(1.0, std::fabs(x))));
}

Eigen::Index family_dimension(const CleanFamily& family) {
  return std::visit(
      Overloaded{
          [](const GaussianFamily& f) { return f.mean.size(); },
          [](const BernoulliProductFamily& f) { return f.p.size(); },
          [](const UniformBallFamily& f) { return f.n; },
          [](const TwoPointFamily& f) { return f.n; },
          [](const StudentTFamily& f) { return f.n; },
      },
      family);
}

void validate_family(const CleanFamily& family) {
  std::visit(
      Overloaded{
          [](const GaussianFamily& f) {
            if (f.mean.size() < 1 || !f.mean.allFinite()) {
              throw ConfigError("gaussian family: mean must be nonempty and finite");
            }
            if (f.covariance.rows() != f.mean.size() || f.covariance.cols() != f.mean.size() ||
                !f.covariance.allFinite()) {
              throw ConfigError("gaussian family: covariance must be n x n and finite");
            }
          },
          [](const BernoulliProductFamily& f) {
            if (f.p.size() < 1) {
              throw ConfigError("bernoulli family: p must be nonempty");
            }
            if (!f.p.allFinite() || f.p.minCoeff() < 0.0 || f.p.maxCoeff() > 1.0) {
              throw ConfigError("bernoulli family: p entries must lie in [0, 1]");
            }
          },
          [](const UniformBallFamily& f) {
            if (!(f.radius > 0.0) || !std::isfinite(f.radius)) {
              throw ConfigError("uniform ball family: radius must be positive");
            }
            if (f.n < 1) {
              throw ConfigError("uniform ball family: dimension must be at least 1");
            }
          },
          [](const TwoPointFamily& f) {
            if (!(f.sigma > 0.0) || !std::isfinite(f.sigma)) {
              throw ConfigError("two point family: sigma must be positive");
            }
            if (f.n < 1) {
              throw ConfigError("two point family: dimension must be at least 1");
            }
          },
          [](const StudentTFamily& f) {
            if (!(f.dof > 4.0) || !std::isfinite(f.dof)) {
              throw ConfigError("student t family: dof must exceed 4");
            }
            if (!(f.scale > 0.0) || !std::isfinite(f.scale)) {
              throw ConfigError("student t family: scale must be positive");
            }
            if (f.n < 1) {
              throw ConfigError("student t family: dimension must be at least 1");
            }
          },
      },
      family);
}

void validate_adversary(const AdversaryStrategy& adv, Eigen::Index n) {
  std::visit(
      Overloaded{
          [n](const PointMass& a) {
            if (a.location.size() != n || !a.location.allFinite()) {
              throw ConfigError("point mass adversary: location must be finite with the family's dimension");
            }
          },
          [n](const AxisPair& a) {
            if (a.axis < 0 || a.axis >= n) {
              throw ConfigError("axis pair adversary: axis out of range");
            }
            if (!std::isfinite(a.distance)) {
              throw ConfigError("axis pair adversary: distance must be finite");
            }
          },
          [](const ThreePointTail& a) {
            if (!(a.sigma > 0.0) || !std::isfinite(a.sigma)) {
              throw ConfigError("three point tail adversary: sigma must be positive");
            }
            if (!(a.eta > 0.0) || !(a.eta < 1.0)) {
              throw ConfigError("three point tail adversary: eta must lie in (0, 1)");
            }
          },
          [](const GaussianTVSwap& a) {
            if (!std::isfinite(a.mu1) || !std::isfinite(a.mu2)) {
              throw ConfigError("tv swap adversary: means must be finite");
            }
            if (!(a.sigma > 0.0) || !std::isfinite(a.sigma)) {
              throw ConfigError("tv swap adversary: sigma must be positive");
            }
          },
          [](const GeomMedianKiller& a) {
            if (!std::isfinite(a.distance)) {
              throw ConfigError("geom median adversary: distance must be finite");
            }
          },
      },
      adv);
}

GroundTruth family_truth(const CleanFamily& family, Eigen::Index n) {
  GroundTruth truth{Vector::Zero(n), SymMatrix::zero(n), ""};
  std::visit(
      Overloaded{
          [&](const GaussianFamily& f) {
            truth.mean = f.mean;
            truth.covariance = SymMatrix(f.covariance);
            truth.family = "gaussian";
          },
          [&](const BernoulliProductFamily& f) {
            truth.mean = f.centered ? Vector::Zero(n) : f.p;
            Matrix cov = Matrix::Zero(n, n);
            cov.diagonal() = f.p.array() * (1.0 - f.p.array());
            truth.covariance = SymMatrix(cov);
            truth.family = "bernoulli_product";
          },
          [&](const UniformBallFamily& f) {
            double v = f.radius * f.radius / static_cast<double>(f.n + 2);
            truth.covariance = SymMatrix(Matrix::Identity(n, n) * v);
            truth.family = "uniform_ball";
          },
          [&](const TwoPointFamily& f) {
            Matrix cov = Matrix::Zero(n, n);
            cov(0, 0) = f.sigma * f.sigma;
            truth.covariance = SymMatrix(cov);
            truth.family = "two_point";
          },
          [&](const StudentTFamily& f) {
            double v = f.scale * f.scale * f.dof / (f.dof - 2.0);
            truth.covariance = SymMatrix(Matrix::Identity(n, n) * v);
            truth.family = "student_t";
          },
      },
      family);
  return truth;
}

// Holds anything worth computing once rather than per row.
struct CleanSampler {
  const CleanFamily& family;
  Matrix transform;  // Gaussian only: symmetric square root of the covariance

  explicit CleanSampler(const CleanFamily& fam) : family(fam) {
    if (const auto* g = std::get_if<GaussianFamily>(&fam)) {
      SubspaceSplit es = eigensystem(SymMatrix(g->covariance));
      Vector roots = es.eigenvalues.array().max(0.0).sqrt();
      transform = es.top_basis * roots.asDiagonal() * es.top_basis.transpose();
    }
  }

  void draw(Rng& g, Vector& row) const {
    std::visit(
        Overloaded{
            [&](const GaussianFamily& f) {
              Vector z(f.mean.size());
              for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = g.normal();
              row = f.mean + transform * z;
            },
            [&](const BernoulliProductFamily& f) {
              for (Eigen::Index k = 0; k < f.p.size(); ++k) {
                double x = g.uniform01() < f.p[k] ? 1.0 : 0.0;
                row[k] = f.centered ? x - f.p[k] : x;
              }
            },
            [&](const UniformBallFamily& f) {
              Vector z(f.n);
              double norm2 = 0.0;
              do {
                for (Eigen::Index k = 0; k < f.n; ++k) z[k] = g.normal();
                norm2 = z.squaredNorm();
              } while (!(norm2 > 0.0));
              double r = f.radius * std::pow(g.uniform01(), 1.0 / static_cast<double>(f.n));
              row = z * (r / std::sqrt(norm2));
            },
            [&](const TwoPointFamily& f) {
              row.setZero();
              row[0] = g.uniform01() < 0.5 ? -f.sigma : f.sigma;
            },
            [&](const StudentTFamily& f) {
              auto k = static_cast<int>(std::llround(f.dof));
              for (Eigen::Index c = 0; c < f.n; ++c) {
                double z0 = g.normal();
                double chi2 = 0.0;
                for (int i = 0; i < k; ++i) {
                  double z = g.normal();
                  chi2 += z * z;
                }
                row[c] = f.scale * z0 / std::sqrt(chi2 / static_cast<double>(k));
              }
            },
        },
        family);
  }
};

struct AdversarySampler {
  const AdversaryStrategy& adv;

  // `ordinal` counts corrupted rows in ascending row order.
  void draw(Rng& g, Eigen::Index ordinal, Vector& row) const {
    std::visit(
        Overloaded{
            [&](const PointMass& a) { row = a.location; },
            [&](const AxisPair& a) {
              row.setZero();
              row[a.axis] = ordinal % 2 == 0 ? a.distance : -a.distance;
            },
            [&](const ThreePointTail& a) {
              row.setZero();
              row[0] = a.sigma / std::pow(a.eta, 0.25);
            },
            [&](const GaussianTVSwap& a) {
              row.setZero();
              // Inverse-CDF proposal from N(mu2, sigma^2), thinned to the
              // positive part of the density gap (phi2 - phi1)_+.
              for (int attempt = 0; attempt < kSwapAttemptCap; ++attempt) {
                double x = a.mu2 + a.sigma * normal_quantile(g.uniform01());
                double p1 = normal_pdf(x, a.mu1, a.sigma);
                double p2 = normal_pdf(x, a.mu2, a.sigma);
                if (p2 <= p1) continue;
                if (g.uniform01() < 1.0 - p1 / p2) {
                  row[0] = x;
                  return;
                }
              }
              throw ConvergenceFailure("tv swap sampler: rejection attempt cap exhausted");
            },
            [&](const GeomMedianKiller& a) {
              row.setZero();
              row[0] = a.distance;
            },
        },
        adv);
  }
};

std::vector<std::uint8_t> place_corruptions(double eta, Eigen::Index m, std::uint64_t seed,
                                            Placement placement) {
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(m), 0);
  if (placement == Placement::Bernoulli) {
    for (Eigen::Index i = 0; i < m; ++i) {
      Rng g(derive_seed(seed, {kPlacementTag, static_cast<std::uint64_t>(i)}));
      if (g.uniform01() < eta) labels[static_cast<std::size_t>(i)] = 1;
    }
    return labels;
  }
  Eigen::Index nadv = snapped_floor(eta * static_cast<double>(m));
  if (nadv <= 0) return labels;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng g(derive_seed(seed, {kPlacementTag}));
  for (Eigen::Index i = 0; i < nadv; ++i) {
    auto span = static_cast<std::uint64_t>(m - i);
    auto j = i + static_cast<Eigen::Index>(g.next_u64() % span);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  for (Eigen::Index i = 0; i < nadv; ++i) {
    labels[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1;
  }
  return labels;
}

}  // namespace

LabeledDataset sample_contaminated(const CleanFamily& family, const AdversaryStrategy& adv,
                                   double eta, Eigen::Index m, std::uint64_t seed,
                                   Placement placement) {
  if (!(eta >= 0.0) || !(eta < 1.0)) {
    throw ConfigError("sample_contaminated: eta must lie in [0, 1)");
  }
  if (m < 1) {
    throw ConfigError("sample_contaminated: m must be at least 1");
  }
  validate_family(family);
  Eigen::Index n = family_dimension(family);
  validate_adversary(adv, n);

  std::vector<std::uint8_t> labels = place_corruptions(eta, m, seed, placement);
  CleanSampler clean(family);
  AdversarySampler bad{adv};

  Matrix rows(m, n);
  Vector buffer(n);
  Eigen::Index ordinal = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (labels[static_cast<std::size_t>(i)]) {
      Rng g(derive_seed(seed, {kAdvTag, static_cast<std::uint64_t>(ordinal)}));
      bad.draw(g, ordinal, buffer);
      ++ordinal;
    } else {
      Rng g(derive_seed(seed, {kCleanTag, static_cast<std::uint64_t>(i)}));
      clean.draw(g, buffer);
    }
    rows.row(i) = buffer.transpose();
  }
  return LabeledDataset(Dataset(std::move(rows)), std::move(labels), family_truth(family, n));
}

LabeledDataset geom_median_instance(Eigen::Index n, double eta, Eigen::Index m,
                                    std::uint64_t seed) {
  if (n < 2) {
    throw ConfigError("geom_median_instance: n must be at least 2");
  }
  Matrix cov = Matrix::Identity(n, n);
  cov(0, 0) = 0.0;
  LabeledDataset out =
      sample_contaminated(GaussianFamily{Vector::Zero(n), cov},
                          GeomMedianKiller{static_cast<double>(n)}, eta, m, seed);
  out.truth.family = "geom_median_instance";
  return out;
}

double tv_swap_delta(double eta, double sigma) {
  if (!(eta > 0.0) || !(eta < 0.5)) {
    throw ConfigError("tv_swap_delta: eta must lie in (0, 1/2)");
  }
  if (!(sigma > 0.0)) {
    throw ConfigError("tv_swap_delta: sigma must be positive");
  }
  double tv = eta / (1.0 - eta);
  return 2.0 * sigma * normal_quantile((1.0 + tv) / 2.0);
}

GaussianTVSwap make_tv_swap(double mu1, double sigma, double eta) {
  return GaussianTVSwap{mu1, mu1 + tv_swap_delta(eta, sigma), sigma};
}

double normal_pdf(double x, double mu, double sigma) {
  static const double kInvSqrt2Pi = 0.3989422804014326779399461;
  double z = (x - mu) / sigma;
  return kInvSqrt2Pi / sigma * std::exp(-0.5 * z * z);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

// Rational initial guess followed by one Halley refinement against erfc,
// accurate to full double precision away from the extreme tails.
double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw ConfigError("normal_quantile: p must lie in (0, 1)");
  }
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double e = normal_cdf(x) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace agnostic
