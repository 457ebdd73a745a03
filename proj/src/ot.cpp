#include "aeot/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace aeot::ot {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Karp's minimum mean cycle over the complete digraph with edge weights
// w(i, k), i != k. O(n^3) time, O(n^2) memory.
double min_cycle_mean(const Eigen::MatrixXd& w) {
  const Index n = w.rows();
  // walk(k, v): lightest walk of exactly k edges ending at v, any start.
  Eigen::MatrixXd walk(n + 1, n);
  walk.row(0).setZero();
  for (Index k = 1; k <= n; ++k) {
    for (Index v = 0; v < n; ++v) {
      double best = kInf;
      for (Index u = 0; u < n; ++u) {
        if (u == v) continue;
        best = std::min(best, walk(k - 1, u) + w(u, v));
      }
      walk(k, v) = best;
    }
  }
  double result = kInf;
  for (Index v = 0; v < n; ++v) {
    double worst = -kInf;
    for (Index k = 0; k < n; ++k) {
      worst = std::max(worst, (walk(n, v) - walk(k, v)) / static_cast<double>(n - k));
    }
    result = std::min(result, worst);
  }
  return result;
}

// Source potentials phi with psi_{sigma(k)} = phi_k + c_{k sigma(k)} tight on
// the assignment and every other constraint slack by at least half of the
// best achievable margin. Among those, returns the average over every anchor
// j of the midpoint between the largest and smallest solutions with
// phi_j = 0, which does not depend on how the points are numbered. Returns
// false when no positive margin exists (the optimal assignment is not
// unique), in which case phi is untouched.
bool central_potentials(const CostMatrix& cost, const std::vector<Index>& sigma,
                        Eigen::VectorXd& phi) {
  const Index n = cost.size();
  if (n == 1) {
    phi = Eigen::VectorXd::Zero(1);
    return true;
  }
  // psi_{sigma(k)} - phi_i <= c_{i sigma(k)} becomes the difference
  // constraint phi_k - phi_i <= w(i, k).
  Eigen::MatrixXd w(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < n; ++k) {
      w(i, k) = i == k ? 0.0 : cost(i, sigma[k]) - cost(k, sigma[k]);
    }
  }
  const double best_margin = min_cycle_mean(w);
  const double scale = 1.0 + cost.entries().cwiseAbs().maxCoeff();
  if (!(best_margin > 1e-12 * scale)) return false;

  // All-pairs shortest paths under w - margin. Every cycle stays positive, so
  // d(j, k) bounds phi_k - phi_j from above and -d(k, j) from below.
  const double margin = 0.5 * best_margin;
  Eigen::MatrixXd d = w.array() - margin;
  d.diagonal().setZero();
  for (Index via = 0; via < n; ++via) {
    for (Index k = 0; k < n; ++k) {
      const double head = d(via, k);
      for (Index i = 0; i < n; ++i) d(i, k) = std::min(d(i, k), d(i, via) + head);
    }
  }
  for (Index k = 0; k < n; ++k)
    if (d(k, k) < 0.0) return false;

  phi.resize(n);
  for (Index k = 0; k < n; ++k) {
    double sum = 0.0;
    for (Index j = 0; j < n; ++j) sum += d(j, k) - d(k, j);
    phi(k) = 0.5 * sum / static_cast<double>(n);
  }
  return true;
}

double dual_objective(const Eigen::VectorXd& phi, const Eigen::VectorXd& psi) {
  double sum_psi = 0.0;
  double sum_phi = 0.0;
  for (Index i = 0; i < phi.size(); ++i) {
    sum_psi += psi(i);
    sum_phi += phi(i);
  }
  const double m = static_cast<double>(phi.size());
  return sum_psi / m - sum_phi / m;
}

DualPotentials build_dual(const CostMatrix& cost, const Assignment& assignment,
                          DualSelection selection) {
  const Index n = cost.size();
  Eigen::VectorXd phi = -assignment.row_price;
  Eigen::VectorXd psi = assignment.col_price;
  if (selection == DualSelection::central &&
      central_potentials(cost, assignment.row_to_col, phi)) {
    for (Index k = 0; k < n; ++k) {
      const Index j = assignment.row_to_col[k];
      psi(j) = phi(k) + cost(k, j);
    }
  }
  const double gauge = phi(0);
  phi.array() -= gauge;
  psi.array() -= gauge;
  DualPotentials out{std::move(phi), std::move(psi), 0.0};
  out.objective = dual_objective(out.source, out.target);
  return out;
}

TransportPlan build_plan(const CostMatrix& cost, const Assignment& assignment) {
  const Index n = cost.size();
  const double mass = 1.0 / static_cast<double>(n);
  TransportPlan plan;
  plan.coupling = Eigen::MatrixXd::Zero(n, n);
  plan.assignment = assignment.row_to_col;
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Index j = assignment.row_to_col[i];
    plan.coupling(i, j) = mass;
    total += cost(i, j);
  }
  plan.cost = total * mass;
  return plan;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() < 1) throw std::invalid_argument("DiscreteMeasure: needs at least one point");
  if (points_.cols() < 1) throw std::invalid_argument("DiscreteMeasure: dimension must be >= 1");
  if (!points_.allFinite()) throw std::invalid_argument("DiscreteMeasure: non-finite coordinate");
}

CostMatrix::CostMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0) throw std::invalid_argument("CostMatrix: empty");
  if (entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("CostMatrix: not square (" + std::to_string(entries_.rows()) +
                                "x" + std::to_string(entries_.cols()) + ")");
  }
  for (Index j = 0; j < entries_.cols(); ++j) {
    for (Index i = 0; i < entries_.rows(); ++i) {
      const double c = entries_(i, j);
      if (std::isnan(c) || std::isinf(c)) throw std::invalid_argument("CostMatrix: non-finite entry");
      if (c < 0.0) throw std::invalid_argument("CostMatrix: negative entry");
    }
  }
}

bool Matching::is_bijection() const {
  std::vector<bool> hit(sigma.size(), false);
  for (Index j : sigma) {
    if (j < 0 || j >= size() || hit[j]) return false;
    hit[j] = true;
  }
  return true;
}

CostMatrix cost_matrix(const DiscreteMeasure& src, const DiscreteMeasure& tgt) {
  if (src.dim() != tgt.dim()) throw std::invalid_argument("cost_matrix: dimension mismatch");
  if (src.size() != tgt.size()) throw std::invalid_argument("cost_matrix: size mismatch");
  const Index m = src.size();
  const Index d = src.dim();
  Eigen::MatrixXd c(m, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) {
      double s = 0.0;
      for (Index k = 0; k < d; ++k) {
        const double diff = src.points()(i, k) - tgt.points()(j, k);
        s += diff * diff;
      }
      c(i, j) = 0.5 * s;
    }
  }
  return CostMatrix(std::move(c));
}

Assignment solve_assignment(const CostMatrix& cost) {
  const Index n = cost.size();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  std::vector<Index> owner(n, -1);  // row assigned to column j

  std::vector<double> min_slack(n);
  std::vector<Index> via(n);  // previous column on the alternating path, -1 = root
  std::vector<char> done(n);

  for (Index root = 0; root < n; ++root) {
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(via.begin(), via.end(), -1);
    std::fill(done.begin(), done.end(), 0);

    Index col = -1;  // -1 stands for the virtual column holding the root row
    Index row = root;
    while (true) {
      double delta = kInf;
      Index next = -1;
      for (Index j = 0; j < n; ++j) {
        if (done[j]) continue;
        const double slack = cost(row, j) - u(row) - v(j);
        if (slack < min_slack[j]) {
          min_slack[j] = slack;
          via[j] = col;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          next = j;
        }
      }
      u(root) += delta;
      for (Index j = 0; j < n; ++j) {
        if (done[j]) {
          u(owner[j]) += delta;
          v(j) -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      done[next] = 1;
      col = next;
      if (owner[col] < 0) break;
      row = owner[col];
    }
    // Flip the alternating path back to the root.
    while (col >= 0) {
      const Index prev = via[col];
      owner[col] = prev >= 0 ? owner[prev] : root;
      col = prev;
    }
  }

  Assignment out;
  out.row_to_col.assign(n, -1);
  for (Index j = 0; j < n; ++j) out.row_to_col[owner[j]] = j;
  out.row_price = std::move(u);
  out.col_price = std::move(v);
  return out;
}

OtSolution solve(const CostMatrix& cost, DualSelection selection) {
  const Assignment assignment = solve_assignment(cost);
  return {build_plan(cost, assignment), build_dual(cost, assignment, selection)};
}

DualPotentials solve_dual(const CostMatrix& cost, DualSelection selection) {
  return build_dual(cost, solve_assignment(cost), selection);
}

TransportPlan solve_primal(const CostMatrix& cost) {
  return build_plan(cost, solve_assignment(cost));
}

Eigen::VectorXd c_transform(const Eigen::VectorXd& phi, const CostMatrix& cost) {
  if (phi.size() != cost.size()) throw std::invalid_argument("c_transform: length mismatch");
  const Index m = cost.size();
  Eigen::VectorXd psi(m);
  for (Index j = 0; j < m; ++j) {
    double best = kInf;
    for (Index i = 0; i < m; ++i) best = std::min(best, cost(i, j) + phi(i));
    psi(j) = best;
  }
  return psi;
}

Matching ordering(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                  const DualPotentials& pot) {
  if (src.size() != tgt.size() || src.size() != pot.source.size() ||
      tgt.size() != pot.target.size()) {
    throw std::invalid_argument("ordering: size mismatch");
  }
  if (src.dim() != tgt.dim()) throw std::invalid_argument("ordering: dimension mismatch");
  const Index m = src.size();
  const Index d = src.dim();
  Matching out;
  out.sigma.resize(m);
  for (Index i = 0; i < m; ++i) {
    double best = kInf;
    Index arg = 0;
    for (Index j = 0; j < m; ++j) {
      double s = 0.0;
      for (Index k = 0; k < d; ++k) {
        const double diff = src.points()(i, k) - tgt.points()(j, k);
        s += diff * diff;
      }
      const double value = 0.5 * s + pot.source(i) - pot.target(j);
      if (value < best) {
        best = value;
        arg = j;
      }
    }
    out.sigma[i] = arg;
  }
  return out;
}

double max_dual_violation(const DualPotentials& pot, const CostMatrix& cost) {
  const Index m = cost.size();
  double worst = -kInf;
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) {
      worst = std::max(worst, pot.target(j) - pot.source(i) - cost(i, j));
    }
  }
  return worst;
}

void write_instance_csv(std::ostream& out, const CostMatrix& cost, const TransportPlan& plan) {
  const auto old_precision = out.precision(17);
  out << "i,j,cost,plan\n";
  for (Index i = 0; i < cost.size(); ++i) {
    for (Index j = 0; j < cost.size(); ++j) {
      out << i << ',' << j << ',' << cost(i, j) << ',' << plan.coupling(i, j) << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace aeot::ot
