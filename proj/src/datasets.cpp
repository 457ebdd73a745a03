#include "aeot/datasets.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

namespace aeot::data {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void check_magic(std::uint32_t got, std::uint32_t want) {
  if (got != want) {
    throw IdxError(IdxErrorKind::bad_magic, "IDX: bad magic " + std::to_string(got) +
                                                ", expected " + std::to_string(want));
  }
}

}  // namespace

Eigen::Matrix<double, ToySpec::kModes, 2> ToySpec::centers() const {
  const double a = radius / std::sqrt(2.0);
  Eigen::Matrix<double, kModes, 2> c;
  c << radius, 0.0,  //
      -radius, 0.0,  //
      0.0, radius,   //
      0.0, -radius,  //
      a, a,          //
      a, -a,         //
      -a, a,         //
      -a, -a;
  return c;
}

ot::DiscreteMeasure sample_toy(const ToySpec& spec, Rng& rng) {
  if (spec.points_per_mode < 1 || !(spec.variance > 0.0))
    throw std::invalid_argument("sample_toy: invalid spec");
  const auto centers = spec.centers();
  const double sigma = std::sqrt(spec.variance);
  Eigen::MatrixXd points(spec.total_points(), 2);
  Eigen::Index row = 0;
  for (int mode = 0; mode < ToySpec::kModes; ++mode) {
    for (int k = 0; k < spec.points_per_mode; ++k, ++row) {
      points(row, 0) = centers(mode, 0) + sigma * rng.normal();
      points(row, 1) = centers(mode, 1) + sigma * rng.normal();
    }
  }
  return ot::DiscreteMeasure(std::move(points));
}

ot::DiscreteMeasure sample_toy(const ToySpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return sample_toy(spec, rng);
}

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes, std::optional<std::size_t> limit) {
  if (bytes.size() < 16) throw IdxError(IdxErrorKind::truncated_header, "IDX: image header needs 16 bytes");
  check_magic(read_be32(bytes, 0), kIdxImageMagic);
  IdxImages out;
  out.count = read_be32(bytes, 4);
  out.rows = read_be32(bytes, 8);
  out.cols = read_be32(bytes, 12);

  const std::size_t wanted = limit ? std::min<std::size_t>(*limit, out.count) : out.count;
  std::size_t per_image = 0;
  std::size_t total = 0;
  if (__builtin_mul_overflow(std::size_t{out.rows}, std::size_t{out.cols}, &per_image) ||
      __builtin_mul_overflow(per_image, wanted, &total) ||
      total > std::numeric_limits<std::size_t>::max() - 16) {
    throw IdxError(IdxErrorKind::dimension_overflow, "IDX: count*rows*cols overflows");
  }
  if (bytes.size() - 16 < total) {
    throw IdxError(IdxErrorKind::truncated_data,
                   "IDX: expected " + std::to_string(total) + " pixel bytes, found " +
                       std::to_string(bytes.size() - 16));
  }
  out.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(total));
  return out;
}

IdxLabels parse_idx_labels(std::span<const std::uint8_t> bytes, std::optional<std::size_t> limit) {
  if (bytes.size() < 8) throw IdxError(IdxErrorKind::truncated_header, "IDX: label header needs 8 bytes");
  check_magic(read_be32(bytes, 0), kIdxLabelMagic);
  IdxLabels out;
  out.count = read_be32(bytes, 4);
  const std::size_t wanted = limit ? std::min<std::size_t>(*limit, out.count) : out.count;
  if (bytes.size() - 8 < wanted) throw IdxError(IdxErrorKind::truncated_data, "IDX: label data truncated");
  out.labels.assign(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(wanted));
  return out;
}

std::vector<std::uint8_t> encode_idx(const IdxImages& images) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.pixels.size());
  write_be32(out, kIdxImageMagic);
  write_be32(out, images.count);
  write_be32(out, images.rows);
  write_be32(out, images.cols);
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> encode_idx(const IdxLabels& labels) {
  std::vector<std::uint8_t> out;
  write_be32(out, kIdxLabelMagic);
  write_be32(out, labels.count);
  out.insert(out.end(), labels.labels.begin(), labels.labels.end());
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxErrorKind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

IdxImages read_idx_images(const std::filesystem::path& path, std::optional<std::size_t> limit) {
  return parse_idx_images(read_file(path), limit);
}

IdxLabels read_idx_labels(const std::filesystem::path& path, std::optional<std::size_t> limit) {
  return parse_idx_labels(read_file(path), limit);
}

Eigen::MatrixXd normalize(const IdxImages& images) {
  const std::size_t per_image = std::size_t{images.rows} * images.cols;
  if (per_image == 0) return Eigen::MatrixXd(0, 0);
  const auto n = static_cast<Eigen::Index>(images.pixels.size() / per_image);
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(per_image));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index p = 0; p < out.cols(); ++p)
      out(i, p) = images.pixels[static_cast<std::size_t>(i) * per_image + static_cast<std::size_t>(p)] / 255.0;
  return out;
}

Eigen::MatrixXd load_idx_images(const std::filesystem::path& path, std::optional<std::size_t> limit) {
  return normalize(read_idx_images(path, limit));
}

}  // namespace aeot::data
