#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace aeot::io {

// Writes to a temporary sibling and renames it into place, so a reader never
// observes a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

std::string read_text(const std::filesystem::path& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// header line, then one row per matrix row, shortest round-trip decimals.
std::string matrix_csv(const Eigen::MatrixXd& values, const std::vector<std::string>& header);
// Inverse of matrix_csv; the header line is skipped.
Eigen::MatrixXd parse_matrix_csv(const std::string& text);

// Binary PGM (P5, maxval 255). Values are clamped to [0, 1] and rounded.
std::vector<std::uint8_t> encode_pgm(const Eigen::VectorXd& pixels, int rows, int cols);

// Images (one per row, rows*cols pixels) tiled into a grid_rows x grid_cols
// montage; missing tiles stay black.
Eigen::VectorXd montage(const Eigen::MatrixXd& images, int rows, int cols, int grid_rows,
                        int grid_cols);

}  // namespace aeot::io
