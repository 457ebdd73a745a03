#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "aeot/ot.hpp"
#include "aeot/rng.hpp"

namespace aeot::data {

// Eight isotropic Gaussians evenly spaced on a circle.
struct ToySpec {
  double radius = 10.0;
  double variance = 1.0;
  int points_per_mode = 32;

  static constexpr int kModes = 8;

  // Fixed order: (r,0) (-r,0) (0,r) (0,-r) (a,a) (a,-a) (-a,a) (-a,-a), a = r/sqrt(2).
  Eigen::Matrix<double, kModes, 2> centers() const;
  int total_points() const { return kModes * points_per_mode; }
};

// points_per_mode samples from each mode, mode-major in center order.
ot::DiscreteMeasure sample_toy(const ToySpec& spec, Rng& rng);
ot::DiscreteMeasure sample_toy(const ToySpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// IDX containers (the MNIST file format). All header integers are big-endian.

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

enum class IdxErrorKind { io, bad_magic, truncated_header, truncated_data, dimension_overflow };

class IdxError : public std::runtime_error {
 public:
  IdxError(IdxErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  IdxErrorKind kind() const { return kind_; }

 private:
  IdxErrorKind kind_;
};

struct IdxImages {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // row-major, image after image

  friend bool operator==(const IdxImages&, const IdxImages&) = default;
};

struct IdxLabels {
  std::uint32_t count = 0;
  std::vector<std::uint8_t> labels;

  friend bool operator==(const IdxLabels&, const IdxLabels&) = default;
};

// `limit` reads only the first images, so a file holding a prefix of a
// larger set is accepted; the header count is kept as written.
IdxImages parse_idx_images(std::span<const std::uint8_t> bytes,
                           std::optional<std::size_t> limit = std::nullopt);
IdxLabels parse_idx_labels(std::span<const std::uint8_t> bytes,
                           std::optional<std::size_t> limit = std::nullopt);

std::vector<std::uint8_t> encode_idx(const IdxImages& images);
std::vector<std::uint8_t> encode_idx(const IdxLabels& labels);

IdxImages read_idx_images(const std::filesystem::path& path,
                          std::optional<std::size_t> limit = std::nullopt);
IdxLabels read_idx_labels(const std::filesystem::path& path,
                          std::optional<std::size_t> limit = std::nullopt);

// N x (rows * cols), pixel / 255. N is min(limit, header count).
Eigen::MatrixXd normalize(const IdxImages& images);
Eigen::MatrixXd load_idx_images(const std::filesystem::path& path,
                                std::optional<std::size_t> limit = std::nullopt);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace aeot::data
