#pragma once

// Discrete optimal transport between two equal-size uniform empirical
// measures under the cost c(x, y) = 1/2 |x - y|^2.
//
// Primal:  min  sum_ij c_ij rho_ij   s.t. rows and columns of rho sum to 1/m
// Dual:    max  (1/m) sum_j psi_j - (1/m) sum_i phi_i
//          s.t. psi_j - phi_i <= c_ij
//
// With uniform masses the primal has a permutation optimum, so both problems
// are solved through one linear assignment solve.

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace aeot::ot {

using Index = Eigen::Index;

inline constexpr double kFeasTol = 1e-9;

// m points in R^d (one per row), each carrying mass 1/m.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(Eigen::MatrixXd points);

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  double mass() const { return 1.0 / static_cast<double>(points_.rows()); }
  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::VectorXd point(Index i) const { return points_.row(i).transpose(); }

 private:
  Eigen::MatrixXd points_;
};

class CostMatrix {
 public:
  // Validates: square, non-empty, finite and nonnegative entries.
  explicit CostMatrix(Eigen::MatrixXd entries);

  Index size() const { return entries_.rows(); }
  double operator()(Index i, Index j) const { return entries_(i, j); }
  const Eigen::MatrixXd& entries() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

struct DualPotentials {
  Eigen::VectorXd source;  // phi_i
  Eigen::VectorXd target;  // psi_j
  double objective = 0.0;
};

struct TransportPlan {
  Eigen::MatrixXd coupling;
  double cost = 0.0;
  std::vector<Index> assignment;  // row i sends its mass to column assignment[i]
};

struct Matching {
  std::vector<Index> sigma;

  Index size() const { return static_cast<Index>(sigma.size()); }
  bool is_bijection() const;
};

// Raw output of the assignment solver in its own sign convention:
// reduced costs c_ij - row_price_i - col_price_j are >= 0 and vanish on the
// assignment.
struct Assignment {
  std::vector<Index> row_to_col;
  Eigen::VectorXd row_price;
  Eigen::VectorXd col_price;
};

// Which optimal dual point solve_dual returns. The dual optimum is a face,
// not a point, whenever the LP is degenerate (always, for m >= 2).
enum class DualSelection {
  // Row/column prices of the shortest augmenting path solver. Optimal, but
  // typically tight on edges outside the assignment.
  solver_prices,
  // Optimal potentials whose slack psi_j - phi_i - c_ij on every edge outside
  // the assignment is at least half the largest achievable smallest slack,
  // taken at a centre of that set that is independent of point numbering.
  // When the optimal assignment is unique the slack is strictly positive, so
  // the argmin ordering recovers the assignment exactly.
  central,
};

struct OtSolution {
  TransportPlan plan;
  DualPotentials dual;
};

CostMatrix cost_matrix(const DiscreteMeasure& src, const DiscreteMeasure& tgt);

// Jonker-Volgenant style shortest augmenting path, O(m^3). Ties between
// equally short paths go to the lowest column index.
Assignment solve_assignment(const CostMatrix& cost);

// Gauge-fixed so that phi_0 == 0.
DualPotentials solve_dual(const CostMatrix& cost,
                          DualSelection selection = DualSelection::central);
TransportPlan solve_primal(const CostMatrix& cost);
OtSolution solve(const CostMatrix& cost,
                 DualSelection selection = DualSelection::central);

// psi_j = min_i (c_ij + phi_i)
Eigen::VectorXd c_transform(const Eigen::VectorXd& phi, const CostMatrix& cost);

// sigma(i) = argmin_j 1/2 |x_i - y_j|^2 + phi_i - psi_j, lowest j on ties.
Matching ordering(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                  const DualPotentials& pot);

// max_ij (psi_j - phi_i - c_ij); <= 0 means feasible.
double max_dual_violation(const DualPotentials& pot, const CostMatrix& cost);

// Debug dump, one row per (i, j): i,j,cost,plan
void write_instance_csv(std::ostream& out, const CostMatrix& cost,
                        const TransportPlan& plan);

}  // namespace aeot::ot
