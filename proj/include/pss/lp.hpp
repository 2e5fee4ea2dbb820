#pragma once

// Dense two-phase primal simplex with Bland's rule. Sized for desk-scale ground
// truth (a few hundred columns); not intended as a general LP solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pss/errors.hpp"

namespace pss::lp {

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct LinearConstraint {
  Eigen::VectorXd coeffs;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

struct LinearProgram {
  /// minimize objective . x
  Eigen::VectorXd objective;
  std::vector<LinearConstraint> constraints;
  /// free_variable[j] == false means x_j >= 0. Empty means all free.
  std::vector<bool> free_variable;

  Eigen::Index num_vars() const { return objective.size(); }
};

enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Solution {
  Status status = Status::kInfeasible;
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::quiet_NaN();
};

inline std::string to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
  }
  return "unknown";
}

namespace detail {

class Tableau {
 public:
  Tableau(Eigen::MatrixXd rows, Eigen::VectorXd rhs, std::vector<Eigen::Index> basis)
      : a_(std::move(rows)), b_(std::move(rhs)), basis_(std::move(basis)) {}

  /// Minimizes cost . z over the current feasible basis. Columns with allowed[j] == false
  /// never enter. Returns false when unbounded.
  bool minimize(const Eigen::VectorXd& cost, const std::vector<bool>& allowed) {
    const Eigen::Index m = a_.rows();
    const Eigen::Index n = a_.cols();
    // Bland's rule guarantees termination; the cap only guards against tolerance cycling.
    const std::size_t max_pivots = 50000;
    for (std::size_t it = 0; it < max_pivots; ++it) {
      Eigen::VectorXd cb(m);
      for (Eigen::Index i = 0; i < m; ++i) cb[i] = cost[basis_[static_cast<std::size_t>(i)]];
      Eigen::Index entering = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!allowed[static_cast<std::size_t>(j)] || is_basic(j)) continue;
        const double reduced = cost[j] - cb.dot(a_.col(j));
        if (reduced < -kEps * (1.0 + std::abs(cost[j]))) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        const double aij = a_(i, entering);
        if (aij > kEps) best_ratio = std::min(best_ratio, b_[i] / aij);
      }
      if (!std::isfinite(best_ratio)) return false;
      // Bland: among tied rows leave the one with the smallest basic index.
      Eigen::Index leaving = -1;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double aij = a_(i, entering);
        if (aij <= kEps || b_[i] / aij > best_ratio + kEps) continue;
        if (leaving < 0 ||
            basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)]) {
          leaving = i;
        }
      }
      pivot(leaving, entering);
    }
    throw ConfigError("lp: pivot limit reached");
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    const double p = a_(row, col);
    a_.row(row) /= p;
    b_[row] /= p;
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      if (i == row) continue;
      const double factor = a_(i, col);
      if (factor == 0.0) continue;
      a_.row(i) -= factor * a_.row(row);
      b_[i] -= factor * b_[row];
      if (std::abs(b_[i]) < kEps * 1e-2) b_[i] = 0.0;
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  bool is_basic(Eigen::Index j) const {
    for (Eigen::Index bj : basis_) {
      if (bj == j) return true;
    }
    return false;
  }

  Eigen::VectorXd primal(Eigen::Index n) const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      z[basis_[i]] = b_[static_cast<Eigen::Index>(i)];
    }
    return z;
  }

  /// Pivots artificial columns (index >= first_artificial) out of the basis where possible and
  /// drops rows that are linearly dependent.
  void expel_artificials(Eigen::Index first_artificial) {
    for (Eigen::Index i = 0; i < a_.rows();) {
      if (basis_[static_cast<std::size_t>(i)] < first_artificial) {
        ++i;
        continue;
      }
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < first_artificial; ++j) {
        if (!is_basic(j) && std::abs(a_(i, j)) > 1e-9) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
        ++i;
      } else {
        drop_row(i);
      }
    }
  }

  void drop_row(Eigen::Index row) {
    const Eigen::Index m = a_.rows();
    Eigen::MatrixXd a(m - 1, a_.cols());
    Eigen::VectorXd b(m - 1);
    std::vector<Eigen::Index> basis;
    for (Eigen::Index i = 0, r = 0; i < m; ++i) {
      if (i == row) continue;
      a.row(r) = a_.row(i);
      b[r] = b_[i];
      basis.push_back(basis_[static_cast<std::size_t>(i)]);
      ++r;
    }
    a_ = std::move(a);
    b_ = std::move(b);
    basis_ = std::move(basis);
  }

  static constexpr double kEps = 1e-10;

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace detail

/// Solves `program` exactly up to floating-point pivoting.
inline Solution solve(const LinearProgram& program) {
  const Eigen::Index n = program.num_vars();
  std::vector<bool> is_free = program.free_variable;
  if (is_free.empty()) is_free.assign(static_cast<std::size_t>(n), true);
  if (static_cast<Eigen::Index>(is_free.size()) != n) {
    throw ConfigError("lp: free_variable size mismatch");
  }

  // Column map: original j -> (plus column, minus column or -1).
  std::vector<Eigen::Index> plus(static_cast<std::size_t>(n)), minus(static_cast<std::size_t>(n), -1);
  Eigen::Index cols = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    plus[static_cast<std::size_t>(j)] = cols++;
    if (is_free[static_cast<std::size_t>(j)]) minus[static_cast<std::size_t>(j)] = cols++;
  }
  const Eigen::Index structural = cols;
  const auto m = static_cast<Eigen::Index>(program.constraints.size());

  // Normalize rows to nonnegative rhs.
  std::vector<Sense> senses;
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m, structural);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& c = program.constraints[static_cast<std::size_t>(i)];
    if (c.coeffs.size() != n) throw ConfigError("lp: constraint dimension mismatch");
    double sgn = c.rhs < 0.0 ? -1.0 : 1.0;
    Sense s = c.sense;
    if (sgn < 0.0 && s != Sense::kEqual) {
      s = s == Sense::kLessEqual ? Sense::kGreaterEqual : Sense::kLessEqual;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      rows(i, plus[static_cast<std::size_t>(j)]) = sgn * c.coeffs[j];
      if (minus[static_cast<std::size_t>(j)] >= 0) rows(i, minus[static_cast<std::size_t>(j)]) = -sgn * c.coeffs[j];
    }
    rhs[i] = sgn * c.rhs;
    senses.push_back(s);
  }

  Eigen::Index slack_count = 0, art_count = 0;
  for (Sense s : senses) {
    if (s != Sense::kEqual) ++slack_count;
    if (s != Sense::kLessEqual) ++art_count;
  }
  const Eigen::Index first_art = structural + slack_count;
  const Eigen::Index total = first_art + art_count;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, total);
  a.leftCols(structural) = rows;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  Eigen::Index next_slack = structural, next_art = first_art;
  for (Eigen::Index i = 0; i < m; ++i) {
    switch (senses[static_cast<std::size_t>(i)]) {
      case Sense::kLessEqual:
        a(i, next_slack) = 1.0;
        basis[static_cast<std::size_t>(i)] = next_slack++;
        break;
      case Sense::kGreaterEqual:
        a(i, next_slack++) = -1.0;
        a(i, next_art) = 1.0;
        basis[static_cast<std::size_t>(i)] = next_art++;
        break;
      case Sense::kEqual:
        a(i, next_art) = 1.0;
        basis[static_cast<std::size_t>(i)] = next_art++;
        break;
    }
  }

  detail::Tableau tableau(std::move(a), rhs, std::move(basis));
  std::vector<bool> allowed(static_cast<std::size_t>(total), true);
  if (art_count > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(total);
    phase1.tail(art_count).setOnes();
    tableau.minimize(phase1, allowed);
    const double infeasibility = phase1.dot(tableau.primal(total));
    if (infeasibility > 1e-8 * (1.0 + rhs.lpNorm<1>())) return Solution{Status::kInfeasible, {}, {}};
    tableau.expel_artificials(first_art);
    for (Eigen::Index j = first_art; j < total; ++j) allowed[static_cast<std::size_t>(j)] = false;
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(total);
  for (Eigen::Index j = 0; j < n; ++j) {
    cost[plus[static_cast<std::size_t>(j)]] = program.objective[j];
    if (minus[static_cast<std::size_t>(j)] >= 0) cost[minus[static_cast<std::size_t>(j)]] = -program.objective[j];
  }
  if (!tableau.minimize(cost, allowed)) return Solution{Status::kUnbounded, {}, {}};

  const Eigen::VectorXd z = tableau.primal(total);
  Eigen::VectorXd x(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    x[j] = z[plus[static_cast<std::size_t>(j)]];
    if (minus[static_cast<std::size_t>(j)] >= 0) x[j] -= z[minus[static_cast<std::size_t>(j)]];
  }
  return Solution{Status::kOptimal, x, program.objective.dot(x)};
}

}  // namespace pss::lp
