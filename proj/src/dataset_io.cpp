#include "dataset_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "errors.hpp"

namespace agnostic {
namespace {

constexpr char kMagic[4] = {'R', 'M', 'D', 'S'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint8_t kFlagLabels = 0x01;
constexpr std::uint8_t kFlagTruth = 0x02;

void put_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

  void need(std::size_t count) const {
    if (pos_ + count > bytes_.size()) {
      throw IoError("truncated dataset file: " + path_);
    }
  }

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::uint16_t u16() {
    need(2);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) {
      v |= static_cast<std::uint16_t>(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * i);
    }
    return v;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * i);
    }
    return v;
  }

  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * i);
    }
    return std::bit_cast<double>(v);
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::string& bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_rmds(const std::string& path, const Dataset& d,
               const std::vector<std::uint8_t>* labels, const GroundTruth* truth) {
  auto m = static_cast<std::size_t>(d.m());
  auto n = static_cast<std::size_t>(d.n());
  if (labels && labels->size() != m) {
    throw ConfigError("save_rmds: label count must match the row count");
  }
  if (truth &&
      (truth->mean.size() != d.n() || truth->covariance.n() != d.n())) {
    throw ConfigError("save_rmds: ground truth dimension must match the dataset");
  }

  std::string buf;
  buf.reserve(13 + 8 * m * n + (labels ? (m + 7) / 8 : 0) + (truth ? 8 * (n + n * n) : 0));
  buf.append(kMagic, 4);
  put_u16(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(n));
  put_u32(buf, static_cast<std::uint32_t>(m));
  std::uint8_t flags = 0;
  if (labels) flags |= kFlagLabels;
  if (truth) flags |= kFlagTruth;
  buf.push_back(static_cast<char>(flags));

  for (Eigen::Index i = 0; i < d.m(); ++i) {
    for (Eigen::Index j = 0; j < d.n(); ++j) put_f64(buf, d.rows()(i, j));
  }
  if (labels) {
    std::size_t nbytes = (m + 7) / 8;
    std::string bitmap(nbytes, '\0');
    for (std::size_t i = 0; i < m; ++i) {
      if ((*labels)[i]) bitmap[i / 8] |= static_cast<char>(1u << (i % 8));
    }
    buf += bitmap;
  }
  if (truth) {
    for (Eigen::Index j = 0; j < d.n(); ++j) put_f64(buf, truth->mean[j]);
    for (Eigen::Index i = 0; i < d.n(); ++i) {
      for (Eigen::Index j = 0; j < d.n(); ++j) put_f64(buf, truth->covariance.mat()(i, j));
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out.good()) {
    throw IoError("write failed: " + path);
  }
}

void save_rmds(const std::string& path, const LabeledDataset& d) {
  save_rmds(path, d.data, &d.labels, &d.truth);
}

RmdsFile load_rmds(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open for reading: " + path);
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) {
    throw IoError("read failed: " + path);
  }

  Reader r(bytes, path);
  r.need(4);
  char magic[4];
  for (auto& ch : magic) ch = static_cast<char>(r.u8());
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("bad magic bytes, not a dataset file: " + path);
  }
  std::uint16_t version = r.u16();
  if (version != kVersion) {
    throw IoError("unsupported dataset file version: " + path);
  }
  auto n = static_cast<Eigen::Index>(r.u32());
  auto m = static_cast<Eigen::Index>(r.u32());
  if (n < 1 || m < 1) {
    throw IoError("dataset file declares an empty matrix: " + path);
  }
  std::uint8_t flags = r.u8();

  r.need(8 * static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
  Matrix rows(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) rows(i, j) = r.f64();
  }

  std::optional<std::vector<std::uint8_t>> labels;
  if (flags & kFlagLabels) {
    std::size_t nbytes = (static_cast<std::size_t>(m) + 7) / 8;
    r.need(nbytes);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(m), 0);
    std::vector<std::uint8_t> raw(nbytes);
    for (auto& byte : raw) byte = r.u8();
    for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i) {
      bits[i] = (raw[i / 8] >> (i % 8)) & 1u;
    }
    labels = std::move(bits);
  }

  std::optional<GroundTruth> truth;
  if (flags & kFlagTruth) {
    r.need(8 * (static_cast<std::size_t>(n) + static_cast<std::size_t>(n) * static_cast<std::size_t>(n)));
    Vector mean(n);
    for (Eigen::Index j = 0; j < n; ++j) mean[j] = r.f64();
    Matrix cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) cov(i, j) = r.f64();
    }
    truth = GroundTruth{std::move(mean), SymMatrix(cov), ""};
  }
  if (r.remaining() != 0) {
    throw IoError("trailing bytes after dataset payload: " + path);
  }
  return RmdsFile{Dataset(std::move(rows)), std::move(labels), std::move(truth)};
}

}  // namespace agnostic
