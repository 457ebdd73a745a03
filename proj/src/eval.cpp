#include "aeot/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "aeot/io.hpp"

namespace aeot::eval {
namespace {

double mean_pairwise_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < b.rows(); ++j) row += (a.row(i) - b.row(j)).norm();
    sum += row;
  }
  return sum / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

}  // namespace

double energy_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() == 0 || b.rows() == 0) throw std::invalid_argument("energy_distance: empty point set");
  if (a.cols() != b.cols()) throw std::invalid_argument("energy_distance: dimension mismatch");
  const double ab = mean_pairwise_distance(a, b);
  const double aa = mean_pairwise_distance(a, a);
  const double bb = mean_pairwise_distance(b, b);
  return std::max(0.0, 2.0 * ab - aa - bb);
}

int ModeReport::covered_modes(int min_count) const {
  return static_cast<int>(std::count_if(counts.begin(), counts.end(),
                                        [&](int c) { return c >= min_count; }));
}

double ModeReport::min_mode_fraction() const {
  if (total == 0) return 0.0;
  return *std::min_element(counts.begin(), counts.end()) / static_cast<double>(total);
}

ModeReport mode_coverage(const Eigen::MatrixXd& points, const data::ToySpec& spec, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("mode_coverage: radius must be positive");
  if (points.cols() != 2) throw std::invalid_argument("mode_coverage: points must be 2-D");
  const auto centers = spec.centers();
  ModeReport report;
  report.radius = radius;
  report.total = static_cast<int>(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < data::ToySpec::kModes; ++c) {
      const double d = (points.row(i) - centers.row(c)).norm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    if (best_d <= radius)
      ++report.counts[static_cast<std::size_t>(best)];
    else
      ++report.outside;
  }
  return report;
}

double mean_squared_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.size() == 0)
    throw std::invalid_argument("mean_squared_error: shape mismatch or empty");
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double mean_image_baseline_mse(const Eigen::MatrixXd& images) {
  if (images.rows() == 0) throw std::invalid_argument("mean_image_baseline_mse: no images");
  const Eigen::RowVectorXd mean = images.colwise().mean();
  return (images.rowwise() - mean).squaredNorm() / static_cast<double>(images.size());
}

PotentialGrid potential_grid(const nn::Mlp& potential, double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi > lo)) throw std::invalid_argument("potential_grid: bad range");
  if (potential.input_dim() != 2) throw std::invalid_argument("potential_grid: potential must be 2-D");
  const auto n = static_cast<Eigen::Index>(std::llround((hi - lo) / step)) + 1;
  PotentialGrid g;
  g.lo = lo;
  g.hi = hi;
  g.step = step;
  g.xs.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) g.xs(k) = lo + step * static_cast<double>(k);
  g.ys = g.xs;
  Eigen::MatrixXd pts(n * n, 2);
  for (Eigen::Index iy = 0; iy < n; ++iy)
    for (Eigen::Index ix = 0; ix < n; ++ix) pts.row(iy * n + ix) << g.xs(ix), g.ys(iy);
  const Eigen::VectorXd d = nn::evaluate(potential, pts);
  g.values.resize(n, n);
  for (Eigen::Index iy = 0; iy < n; ++iy)
    for (Eigen::Index ix = 0; ix < n; ++ix) g.values(iy, ix) = d(iy * n + ix);
  return g;
}

namespace {

std::string svg_scatter(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target,
                        const Eigen::MatrixXd& transported, double lo, double hi) {
  constexpr double size = 600.0;
  const double scale = size / (hi - lo);
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
    << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const auto layer = [&](const Eigen::MatrixXd& pts, const char* color, const char* name) {
    s << "<g id=\"" << name << "\" fill=\"" << color << "\" fill-opacity=\"0.7\">\n";
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const double x = (pts(i, 0) - lo) * scale;
      const double y = (hi - pts(i, 1)) * scale;
      s << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"2.5\"/>\n";
    }
    s << "</g>\n";
  };
  layer(source, "blue", "source");
  layer(target, "green", "target");
  layer(transported, "red", "transported");
  s << "</svg>\n";
  return s.str();
}

}  // namespace

FigureFiles emit_toy_figure(const std::filesystem::path& dir, const Eigen::MatrixXd& source,
                            const Eigen::MatrixXd& target, const Eigen::MatrixXd& transported,
                            const PotentialGrid& grid) {
  if (source.cols() != 2 || target.cols() != 2 || transported.cols() != 2)
    throw std::invalid_argument("emit_toy_figure: point sets must be 2-D");
  FigureFiles files{dir / "points.csv", dir / "potential_grid.csv", dir / "toy.svg"};

  std::string pts = "set,x,y\n";
  const auto append = [&](const Eigen::MatrixXd& m, const char* name) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      pts += std::string(name) + ',' + io::format_double(m(i, 0)) + ',' + io::format_double(m(i, 1)) + '\n';
  };
  append(source, "source");
  append(target, "target");
  append(transported, "transported");
  io::write_file_atomic(files.points_csv, pts);

  std::string g = "x,y,D\n";
  for (Eigen::Index iy = 0; iy < grid.ys.size(); ++iy)
    for (Eigen::Index ix = 0; ix < grid.xs.size(); ++ix)
      g += io::format_double(grid.xs(ix)) + ',' + io::format_double(grid.ys(iy)) + ',' +
           io::format_double(grid.values(iy, ix)) + '\n';
  io::write_file_atomic(files.grid_csv, g);

  io::write_file_atomic(files.svg, svg_scatter(source, target, transported, grid.lo, grid.hi));
  return files;
}

}  // namespace aeot::eval
