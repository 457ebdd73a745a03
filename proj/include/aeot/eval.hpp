#pragma once

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <vector>

#include "aeot/datasets.hpp"
#include "aeot/mlp.hpp"

namespace aeot::eval {

// V-statistic energy distance, 2 E|a-b| - E|a-a'| - E|b-b'|, over all ordered
// pairs including self pairs. Rows are points. Exactly 0 when A and B are the
// same matrix; clamped at 0 against rounding otherwise.
double energy_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct ModeReport {
  double radius = 3.0;
  std::array<int, data::ToySpec::kModes> counts{};
  int outside = 0;
  int total = 0;

  int covered_modes(int min_count = 1) const;
  double coverage() const { return covered_modes() / static_cast<double>(counts.size()); }
  // Smallest per-mode share of all points.
  double min_mode_fraction() const;
};

// Each point counts toward its nearest center only, and only within radius.
ModeReport mode_coverage(const Eigen::MatrixXd& points, const data::ToySpec& spec = {},
                         double radius = 3.0);

// Mean squared error, per pixel, of predicting every image by the dataset mean.
double mean_image_baseline_mse(const Eigen::MatrixXd& images);
double mean_squared_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct PotentialGrid {
  double lo = -15.0;
  double hi = 15.0;
  double step = 0.25;
  Eigen::VectorXd xs;
  Eigen::VectorXd ys;
  Eigen::MatrixXd values;  // values(iy, ix) = D(xs[ix], ys[iy])
};

PotentialGrid potential_grid(const nn::Mlp& potential, double lo = -15.0, double hi = 15.0,
                             double step = 0.25);

struct FigureFiles {
  std::filesystem::path points_csv;
  std::filesystem::path grid_csv;
  std::filesystem::path svg;
};

// points.csv: set,x,y with set in {source,target,transported}
// potential_grid.csv: x,y,D
// toy.svg: scatter overlay, target green, source blue, transported red
FigureFiles emit_toy_figure(const std::filesystem::path& dir, const Eigen::MatrixXd& source,
                            const Eigen::MatrixXd& target, const Eigen::MatrixXd& transported,
                            const PotentialGrid& grid);

}  // namespace aeot::eval
