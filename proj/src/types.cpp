#include "types.hpp"

#include <cmath>

namespace agnostic {

Dataset::Dataset(Matrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.cols() < 1) {
    throw EmptyInput("dataset requires m >= 1 and n >= 1");
  }
  if (!rows_.allFinite()) {
    throw EmptyInput("dataset entries must be finite");
  }
}

LabeledDataset::LabeledDataset(Dataset d, std::vector<std::uint8_t> l, GroundTruth t)
    : data(std::move(d)), labels(std::move(l)), truth(std::move(t)) {
  if (static_cast<Eigen::Index>(labels.size()) != data.m()) {
    throw ConfigError("labels length must equal dataset row count");
  }
}

Eigen::Index LabeledDataset::corrupted_count() const {
  Eigen::Index c = 0;
  for (auto b : labels) c += (b != 0);
  return c;
}

void validate_config(const EstimatorConfig& cfg) {
  if (!(std::isfinite(cfg.eta) && cfg.eta >= 0.0 && cfg.eta < 1.0 / 2.1)) {
    throw ConfigError("eta must lie in [0, 1/2.1)");
  }
  if (!(std::isfinite(cfg.eps) && cfg.eps > 0.0 && cfg.eps < 1.0)) {
    throw ConfigError("eps must lie in (0, 1)");
  }
  if (!(cfg.eta + cfg.eps < 1.0)) {
    throw ConfigError("eta + eps must be below 1");
  }
  if (!(std::isfinite(cfg.eps1) && cfg.eps1 > 0.0 && cfg.eps1 <= 1.0)) {
    throw ConfigError("eps1 must lie in (0, 1]");
  }
  if (!(cfg.profile.c4 >= 1.0)) {
    throw ConfigError("profile.c4 must be at least 1");
  }
  if (!(cfg.profile.c42 >= 1.0)) {
    throw ConfigError("profile.c42 must be at least 1");
  }
  if (!(cfg.profile.gamma > 0.0)) {
    throw ConfigError("profile.gamma must be positive");
  }
  if (cfg.profile.mode == Mode::Gaussian &&
      (cfg.profile.c4 != 3.0 || cfg.profile.gamma != 2.0)) {
    throw ConfigError("profile: Gaussian mode pins c4 = 3 and gamma = 2");
  }
  if (!(cfg.opnorm.c1 > 0.0)) throw ConfigError("opnorm.c1 must be positive");
  if (!(cfg.opnorm.c2 > 0.0)) throw ConfigError("opnorm.c2 must be positive");
  if (!(cfg.opnorm.c3 > 0.0)) throw ConfigError("opnorm.c3 must be positive");
  if (!(cfg.opnorm.max_iter_scale > 0.0)) {
    throw ConfigError("opnorm.max_iter_scale must be positive");
  }
  if (cfg.dim_cap < 1) throw ConfigError("dim_cap must be at least 1");
  if (!(cfg.refine_max_eta_log_n > 0.0)) {
    throw ConfigError("refine_max_eta_log_n must be positive");
  }
}

std::vector<Dataset> split_dataset(const Dataset& d, int levels) {
  if (levels < 1) throw ConfigError("levels must be positive");
  const Eigen::Index m = d.m();
  if (m < levels) {
    throw InsufficientSamples("split_dataset requires m >= levels");
  }
  std::vector<Dataset> out;
  out.reserve(levels);
  const Eigen::Index base = m / levels;
  const Eigen::Index rem = m % levels;
  Eigen::Index start = 0;
  for (int i = 0; i < levels; ++i) {
    const Eigen::Index size = base + (i < rem ? 1 : 0);
    out.emplace_back(Matrix(d.rows().middleRows(start, size)));
    start += size;
  }
  return out;
}

}  // namespace agnostic
