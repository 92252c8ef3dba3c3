#include "baselines.hpp"

#include <cmath>

#include "errors.hpp"
#include "scalar_estimators.hpp"
#include "spectral.hpp"

namespace agnostic {

Vector sample_mean(const Dataset& d) {
  return d.rows().colwise().mean().transpose();
}

SampleMoments sample_covariance(const Dataset& d) {
  auto [mean, cov] = weighted_covariance(d, WeightVector{Vector::Ones(d.m())});
  return SampleMoments{std::move(mean), std::move(cov)};
}

Vector coordinate_median(const Dataset& d) {
  Vector out(d.n());
  std::vector<double> column(static_cast<std::size_t>(d.m()));
  for (Eigen::Index c = 0; c < d.n(); ++c) {
    for (Eigen::Index i = 0; i < d.m(); ++i) {
      column[static_cast<std::size_t>(i)] = d.rows()(i, c);
    }
    out[c] = median1d(column);
  }
  return out;
}

namespace {

double objective_at(const Matrix& x, const Vector& y) {
  return (x.rowwise() - y.transpose()).rowwise().norm().sum();
}

}  // namespace

WeiszfeldState geometric_median(const Dataset& d, double tol, int max_iter,
                                std::vector<double>* objective_trace) {
  if (!(tol > 0.0)) {
    throw ConfigError("geometric_median: tol must be positive");
  }
  if (max_iter < 1) {
    throw ConfigError("geometric_median: max_iter must be at least 1");
  }
  const Matrix& x = d.rows();
  WeiszfeldState state;
  state.iterate = coordinate_median(d);
  state.objective = objective_at(x, state.iterate);
  if (objective_trace) {
    objective_trace->clear();
    objective_trace->push_back(state.objective);
  }

  // Distance below which the iterate counts as sitting on a data point; the
  // plain update divides by this distance, so it needs the multiplicity
  // treatment instead.
  const double kAtPoint = 1e-12;

  for (int it = 0; it < max_iter; ++it) {
    Vector pull = Vector::Zero(d.n());      // sum of (x_i - y) / d_i off the point
    Vector weighted = Vector::Zero(d.n());  // sum of x_i / d_i off the point
    double wsum = 0.0;
    Eigen::Index multiplicity = 0;
    for (Eigen::Index i = 0; i < d.m(); ++i) {
      Vector diff = x.row(i).transpose() - state.iterate;
      double dist = diff.norm();
      if (dist < kAtPoint) {
        ++multiplicity;
        continue;
      }
      pull += diff / dist;
      weighted += x.row(i).transpose() / dist;
      wsum += 1.0 / dist;
    }

    state.iterations = it + 1;
    if (wsum <= 0.0) {
      // Every row coincides with the iterate.
      state.converged = true;
      break;
    }

    Vector next = weighted / wsum;
    if (multiplicity > 0) {
      double g = pull.norm();
      if (g <= static_cast<double>(multiplicity)) {
        // The subgradient at the data point contains zero.
        state.converged = true;
        break;
      }
      double lambda = static_cast<double>(multiplicity) / g;
      next = (1.0 - lambda) * next + lambda * state.iterate;
    }

    double step = (next - state.iterate).norm();
    state.iterate = next;
    state.objective = objective_at(x, state.iterate);
    if (objective_trace) objective_trace->push_back(state.objective);
    if (step <= tol * (1.0 + state.iterate.norm())) {
      state.converged = true;
      break;
    }
  }
  return state;
}

}  // namespace agnostic
