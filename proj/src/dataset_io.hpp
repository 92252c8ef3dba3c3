#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "types.hpp"

namespace agnostic {

// RMDS container: magic "RMDS", version u16, n u32, m u32, flags u8
// (bit0 labels, bit1 ground truth), row-major f64 samples, optional label
// bitmap (LSB-first), optional mean then covariance. All integers and floats
// little-endian; round-trips are bit-exact.
struct RmdsFile {
  Dataset data;
  std::optional<std::vector<std::uint8_t>> labels;
  std::optional<GroundTruth> truth;  // family is not stored on disk
};

void save_rmds(const std::string& path, const Dataset& d,
               const std::vector<std::uint8_t>* labels = nullptr,
               const GroundTruth* truth = nullptr);
void save_rmds(const std::string& path, const LabeledDataset& d);

RmdsFile load_rmds(const std::string& path);

}  // namespace agnostic
