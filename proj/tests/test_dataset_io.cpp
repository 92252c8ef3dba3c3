#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "dataset_io.hpp"
#include "errors.hpp"
#include "types.hpp"

using namespace agnostic;

namespace {

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// Bit-level equality; operator== on doubles treats -0.0 == 0.0 and we want
// the container round trip to preserve the exact payload.
bool bit_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("rmds sample payload round-trips bit-exactly") {
  Matrix rows(3, 2);
  rows << 0.1, -0.0,
          1e300, -1e-308,
          3.5, 123456789.0001;
  Dataset d(rows);
  TempFile f("io_roundtrip.rmds");
  save_rmds(f.path, d);

  RmdsFile loaded = load_rmds(f.path);
  CHECK(loaded.data.m() == 3);
  CHECK(loaded.data.n() == 2);
  CHECK(bit_equal(loaded.data.rows(), rows));
  CHECK(std::signbit(loaded.data.rows()(0, 1)));
  CHECK_FALSE(loaded.labels.has_value());
  CHECK_FALSE(loaded.truth.has_value());
}

TEST_CASE("label bitmap round-trips across byte boundaries") {
  // 11 rows exercises a two-byte LSB-first bitmap.
  Matrix rows(11, 1);
  for (int i = 0; i < 11; ++i) rows(i, 0) = static_cast<double>(i);
  Dataset d(rows);
  std::vector<std::uint8_t> labels = {1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 1};
  TempFile f("io_labels.rmds");
  save_rmds(f.path, d, &labels, nullptr);

  RmdsFile loaded = load_rmds(f.path);
  REQUIRE(loaded.labels.has_value());
  CHECK(*loaded.labels == labels);
  CHECK_FALSE(loaded.truth.has_value());
}

TEST_CASE("ground truth round-trips and the family string is not stored") {
  Matrix rows(4, 3);
  rows.setZero();
  rows(0, 0) = 2.0;
  Dataset d(rows);

  Vector mean(3);
  mean << 0.25, -0.0, 7.0;
  Matrix cov(3, 3);
  cov << 2.0, 0.5, 0.0,
         0.5, 1.0, -0.25,
         0.0, -0.25, 3.0;
  GroundTruth truth{mean, SymMatrix(cov), "gaussian"};

  TempFile f("io_truth.rmds");
  save_rmds(f.path, d, nullptr, &truth);

  RmdsFile loaded = load_rmds(f.path);
  REQUIRE(loaded.truth.has_value());
  CHECK(std::memcmp(loaded.truth->mean.data(), mean.data(), sizeof(double) * 3) == 0);
  CHECK(bit_equal(loaded.truth->covariance.mat(), truth.covariance.mat()));
  CHECK(loaded.truth->family.empty());
  CHECK_FALSE(loaded.labels.has_value());
}

TEST_CASE("labeled dataset overload stores both optional sections") {
  Matrix rows(9, 2);
  rows.setConstant(1.5);
  std::vector<std::uint8_t> labels(9, 0);
  labels[2] = 1;
  labels[8] = 1;
  Vector mean = Vector::Zero(2);
  GroundTruth truth{mean, SymMatrix(Matrix::Identity(2, 2)), "unit"};
  LabeledDataset ld(Dataset(rows), labels, truth);

  TempFile f("io_labeled.rmds");
  save_rmds(f.path, ld);

  RmdsFile loaded = load_rmds(f.path);
  REQUIRE(loaded.labels.has_value());
  REQUIRE(loaded.truth.has_value());
  CHECK(*loaded.labels == labels);
  CHECK(bit_equal(loaded.truth->covariance.mat(), Matrix::Identity(2, 2)));
}

TEST_CASE("saving twice produces identical bytes") {
  Matrix rows(5, 4);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) rows(i, j) = 0.1 * i - 0.7 * j;
  Dataset d(rows);
  TempFile a("io_det_a.rmds");
  TempFile b("io_det_b.rmds");
  save_rmds(a.path, d);
  save_rmds(b.path, d);
  CHECK(read_bytes(a.path) == read_bytes(b.path));
}

TEST_CASE("load rejects malformed containers") {
  Matrix rows(2, 2);
  rows << 1.0, 2.0, 3.0, 4.0;
  Dataset d(rows);
  TempFile good("io_good.rmds");
  save_rmds(good.path, d);
  const std::string bytes = read_bytes(good.path);

  TempFile bad("io_bad.rmds");

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_rmds("io_does_not_exist.rmds"), IoError);
  }
  SUBCASE("bad magic") {
    std::string t = bytes;
    t[0] = 'X';
    write_bytes(bad.path, t);
    CHECK_THROWS_AS(load_rmds(bad.path), IoError);
  }
  SUBCASE("unsupported version") {
    std::string t = bytes;
    t[4] = 2;  // version u16 little-endian follows the magic
    write_bytes(bad.path, t);
    CHECK_THROWS_AS(load_rmds(bad.path), IoError);
  }
  SUBCASE("truncated payload") {
    write_bytes(bad.path, bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS(load_rmds(bad.path), IoError);
  }
  SUBCASE("truncated header") {
    write_bytes(bad.path, bytes.substr(0, 6));
    CHECK_THROWS_AS(load_rmds(bad.path), IoError);
  }
  SUBCASE("trailing bytes") {
    write_bytes(bad.path, bytes + "zz");
    CHECK_THROWS_AS(load_rmds(bad.path), IoError);
  }
}

TEST_CASE("save validates optional-section shapes") {
  Matrix rows(3, 2);
  rows.setZero();
  Dataset d(rows);
  TempFile f("io_invalid.rmds");

  SUBCASE("label count must match the row count") {
    std::vector<std::uint8_t> labels(2, 0);
    CHECK_THROWS_AS(save_rmds(f.path, d, &labels, nullptr), ConfigError);
  }
  SUBCASE("truth mean dimension must match the data") {
    GroundTruth truth{Vector::Zero(3), SymMatrix(Matrix::Identity(3, 3)), ""};
    CHECK_THROWS_AS(save_rmds(f.path, d, nullptr, &truth), ConfigError);
  }
  SUBCASE("truth covariance dimension must match the data") {
    GroundTruth truth{Vector::Zero(2), SymMatrix(Matrix::Identity(4, 4)), ""};
    CHECK_THROWS_AS(save_rmds(f.path, d, nullptr, &truth), ConfigError);
  }
}
