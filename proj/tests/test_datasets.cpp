#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "aeot/datasets.hpp"

using namespace aeot;
using data::IdxErrorKind;

namespace {

std::vector<std::uint8_t> image_fixture() {
  // one 2x2 image
  return {0x00, 0x00, 0x08, 0x03, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 0, 255, 128, 64};
}

IdxErrorKind image_error_kind(const std::vector<std::uint8_t>& bytes) {
  try {
    data::parse_idx_images(bytes);
  } catch (const data::IdxError& e) {
    return e.kind();
  }
  FAIL("no IdxError thrown");
  return IdxErrorKind::io;
}

}  // namespace

TEST_CASE("toy centers lie on the radius-10 circle in listed order") {
  const auto c = data::ToySpec{}.centers();
  for (int k = 0; k < data::ToySpec::kModes; ++k) CHECK(c.row(k).norm() == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(c(0, 0) == 10.0);
  CHECK(c(1, 0) == -10.0);
  CHECK(c(2, 1) == 10.0);
  CHECK(c(3, 1) == -10.0);
  CHECK(c(4, 0) == doctest::Approx(10.0 / std::sqrt(2.0)));
  CHECK(c(7, 1) == doctest::Approx(-10.0 / std::sqrt(2.0)));
}

TEST_CASE("toy sample has 32 points per mode near each center") {
  const data::ToySpec spec;
  const auto pts = data::sample_toy(spec, 11).points();
  REQUIRE(pts.rows() == 256);
  REQUIRE(pts.cols() == 2);
  const auto c = spec.centers();
  for (int mode = 0; mode < 8; ++mode) {
    const Eigen::RowVector2d mean = pts.middleRows(mode * 32, 32).colwise().mean();
    CAPTURE(mode);
    CHECK((mean - c.row(mode)).norm() < 0.75);
  }
}

TEST_CASE("toy sample is reproducible per seed") {
  const data::ToySpec spec;
  CHECK(data::sample_toy(spec, 3).points() == data::sample_toy(spec, 3).points());
  CHECK(data::sample_toy(spec, 3).points() != data::sample_toy(spec, 4).points());
  data::ToySpec small;
  small.points_per_mode = 5;
  CHECK(data::sample_toy(small, 0).size() == 40);
}

TEST_CASE("2x2 fixture normalizes to [0, 1, 128/255, 64/255]") {
  const auto img = data::parse_idx_images(image_fixture());
  CHECK(img.count == 1);
  CHECK(img.rows == 2);
  CHECK(img.cols == 2);
  const Eigen::MatrixXd x = data::normalize(img);
  REQUIRE(x.rows() == 1);
  REQUIRE(x.cols() == 4);
  CHECK(x(0, 0) == 0.0);
  CHECK(x(0, 1) == 1.0);
  CHECK(x(0, 2) == 128.0 / 255.0);
  CHECK(x(0, 3) == 64.0 / 255.0);
}

TEST_CASE("IDX errors are reported by kind") {
  auto bytes = image_fixture();

  SUBCASE("truncated header") {
    bytes.resize(10);
    CHECK(image_error_kind(bytes) == IdxErrorKind::truncated_header);
  }
  SUBCASE("bad magic") {
    bytes[3] = 0x01;
    CHECK(image_error_kind(bytes) == IdxErrorKind::bad_magic);
  }
  SUBCASE("truncated pixels") {
    bytes.pop_back();
    CHECK(image_error_kind(bytes) == IdxErrorKind::truncated_data);
  }
  SUBCASE("count larger than file") {
    bytes[7] = 2;
    CHECK(image_error_kind(bytes) == IdxErrorKind::truncated_data);
  }
  SUBCASE("dimension overflow") {
    for (int k = 4; k < 16; ++k) bytes[static_cast<std::size_t>(k)] = 0xff;
    CHECK(image_error_kind(bytes) == IdxErrorKind::dimension_overflow);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(data::read_idx_images("/nonexistent/idx"), data::IdxError);
  }
}

TEST_CASE("IDX encode reproduces the parsed file byte for byte") {
  const auto fixture = image_fixture();
  CHECK(data::encode_idx(data::parse_idx_images(fixture)) == fixture);

  data::IdxImages big{3, 4, 5, {}};
  for (int k = 0; k < 60; ++k) big.pixels.push_back(static_cast<std::uint8_t>(k * 7));
  const auto bytes = data::encode_idx(big);
  CHECK(bytes.size() == 16 + 60);
  CHECK(data::parse_idx_images(bytes) == big);
  CHECK(data::encode_idx(data::parse_idx_images(bytes)) == bytes);
}

TEST_CASE("limit reads a prefix and keeps the header count") {
  data::IdxImages big{3, 2, 2, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}};
  auto bytes = data::encode_idx(big);
  bytes.resize(16 + 8);  // only two images present
  const auto prefix = data::parse_idx_images(bytes, 2);
  CHECK(prefix.count == 3);
  CHECK(data::normalize(prefix).rows() == 2);
  CHECK_THROWS_AS(data::parse_idx_images(bytes), data::IdxError);
}

TEST_CASE("label files parse and round-trip") {
  const data::IdxLabels labels{4, {7, 0, 9, 3}};
  const auto bytes = data::encode_idx(labels);
  CHECK(bytes[3] == 0x01);
  CHECK(data::parse_idx_labels(bytes) == labels);
  CHECK(data::encode_idx(data::parse_idx_labels(bytes)) == bytes);
  CHECK_THROWS_AS(data::parse_idx_images(bytes), data::IdxError);
  auto cut = bytes;
  cut.pop_back();
  CHECK_THROWS_AS(data::parse_idx_labels(cut), data::IdxError);
}

TEST_CASE("files on disk load through the same parser") {
  const auto dir = std::filesystem::temp_directory_path() / "aeot_test_datasets";
  std::filesystem::create_directories(dir);
  const auto path = dir / "fixture-idx3-ubyte";
  {
    const auto bytes = image_fixture();
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  const Eigen::MatrixXd x = data::load_idx_images(path);
  CHECK(x.rows() == 1);
  CHECK(x(0, 1) == 1.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("bundled MNIST subset has the standard header") {
  const std::filesystem::path images = std::filesystem::path(AEOT_SOURCE_DIR) / "data" / "mnist-images-idx3-ubyte";
  const std::filesystem::path labels = std::filesystem::path(AEOT_SOURCE_DIR) / "data" / "mnist-labels-idx1-ubyte";
  if (!std::filesystem::exists(images)) {
    MESSAGE("no MNIST subset under data/, skipping");
    return;
  }
  const auto prefix = data::read_idx_images(images, 100);
  CHECK(prefix.rows == 28);
  CHECK(prefix.cols == 28);
  CHECK(prefix.count >= 100);
  const Eigen::MatrixXd x = data::normalize(prefix);
  CHECK(x.rows() == 100);
  CHECK(x.cols() == 784);
  CHECK(x.minCoeff() >= 0.0);
  CHECK(x.maxCoeff() <= 1.0);

  const auto lab = data::read_idx_labels(labels);
  CHECK(lab.count == prefix.count);
  for (auto l : lab.labels) CHECK(l <= 9);
}
