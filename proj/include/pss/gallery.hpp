#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pss/convex_set.hpp"
#include "pss/errors.hpp"
#include "pss/functions.hpp"
#include "pss/lp.hpp"
#include "pss/point.hpp"
#include "pss/prox.hpp"
#include "pss/random.hpp"
#include "pss/search.hpp"

namespace pss {

/// zeta bounds every f-subgradient the oracle returns on the declared region (here all of dom(g));
/// rho bounds every g-side bounded_subgradient.
struct AssumptionConstants {
  double zeta = 1.0;
  double rho = 0.0;
};

/// Optimal value and one minimizer, derived without running the method.
struct ProblemTruth {
  bool attained = true;
  double s_star = 0.0;  // infimum when not attained
  Point minimizer;      // empty when not attained
  std::string oracle;   // "lp", "golden", "closed_form"
};

struct ProblemInstance {
  std::string name;
  Eigen::Index dim = 0;
  Objective f;
  Regularizer g;
  ProblemTruth truth;
  AssumptionConstants constants;
  Point default_x0;

  double objective(const Point& x) const { return f.value(x) + g.value(x); }
};

namespace gallery {

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"lad_l1", "constrained_max_affine", "sum_of_distances", "dual_finite",
                                              "unattained_inf"};
  return names;
}

namespace detail {

/// Snap an oracle witness into dom(g) and evaluate it with the same code the solver uses.
inline ProblemTruth finalize(const Objective& f, const Regularizer& g, Point x, std::string oracle) {
  if (const auto* ind = std::get_if<SetIndicator>(&g.variant())) x = ind->set().project(x);
  if (std::holds_alternative<NonnegL1Regularizer>(g.variant())) x = x.cwiseMax(0.0);
  ProblemTruth truth;
  truth.attained = true;
  truth.s_star = f.value(x) + g.value(x);
  truth.minimizer = std::move(x);
  truth.oracle = std::move(oracle);
  return truth;
}

inline Point default_start(const Regularizer& g, Eigen::Index dim) { return g.prox(1.0, Point::Zero(dim)); }

/// Radius of a box [-R, R]^d guaranteed to contain the relevant sets.
inline double search_radius(const ConvexSet& set) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, sets::Box>) {
          double r = 0.0;
          for (Eigen::Index i = 0; i < s.lower.size(); ++i) {
            if (std::isfinite(s.lower[i])) r = std::max(r, std::abs(s.lower[i]));
            if (std::isfinite(s.upper[i])) r = std::max(r, std::abs(s.upper[i]));
          }
          return r;
        } else if constexpr (std::is_same_v<T, sets::Ball>) {
          return s.center.cwiseAbs().maxCoeff() + s.radius;
        } else if constexpr (std::is_same_v<T, sets::Halfspace>) {
          return std::abs(s.offset) / s.normal.norm();
        } else if constexpr (std::is_same_v<T, sets::AffineEquality>) {
          return s.b.norm() / std::max(1e-12, s.a.norm()) + 1.0;
        } else if constexpr (std::is_same_v<T, sets::Simplex>) {
          return s.radius;
        } else {
          return 1.0;
        }
      },
      set.spec());
}

/// Constrained convex minimization in dim <= 2 via the exact penalty f + L dist(., C), L > Lip(f).
inline Point penalized_search(const std::function<double(const Point&)>& f, double lipschitz,
                              const std::optional<ConvexSet>& set, Eigen::Index dim, double radius) {
  if (dim > 2) throw ConfigError("search oracle: dimension must be at most 2");
  const double penalty = 2.0 * lipschitz + 1.0;
  auto fn = [&](const Point& y) { return f(y) + (set ? penalty * set->distance(y) : 0.0); };
  const double r = 2.0 * radius + 2.0;
  return search::nested_golden(fn, dim, -r, r).argmin;
}

inline Point lp_or_throw(const lp::LinearProgram& prog, Eigen::Index take, const std::string& who) {
  const lp::Solution sol = lp::solve(prog);
  if (sol.status == lp::Status::kUnbounded) throw ConfigError(who + ": problem unbounded below (no minimizer)");
  if (sol.status == lp::Status::kInfeasible) throw ConfigError(who + ": infeasible constraint set");
  return sol.x.head(take);
}

/// min_x max_i (a_i.x + b_i) + lambda * sum(x) over polyhedral rows; epigraph LP.
inline Point epigraph_lp(const Matrix& a, const Point& b, const std::vector<lp::LinearConstraint>& set_rows,
                         double linear_weight, const std::string& who) {
  const Eigen::Index n = a.cols();
  lp::LinearProgram prog;
  prog.objective = Point::Zero(n + 1);
  prog.objective[n] = 1.0;
  if (linear_weight != 0.0) prog.objective.head(n).setConstant(linear_weight);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Point row(n + 1);
    row.head(n) = a.row(i).transpose();
    row[n] = -1.0;
    prog.constraints.push_back({row, lp::Sense::kLessEqual, -b[i]});
  }
  for (const auto& c : set_rows) {
    Point row = Point::Zero(n + 1);
    row.head(n) = c.coeffs;
    prog.constraints.push_back({row, c.sense, c.rhs});
  }
  return lp_or_throw(prog, n, who);
}

}  // namespace detail

/// f(x) = ||Ax - b||_1, g = lambda ||x||_1; truth from the LP
/// min sum(t) + lambda sum(s) s.t. -t <= Ax - b <= t, -s <= x <= s.
inline ProblemInstance make_lad_l1(const Matrix& a, const Point& b, double lambda) {
  if (a.rows() == 0 || a.cols() == 0 || b.size() != a.rows()) throw ConfigError("lad_l1: dimension mismatch");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lad_l1: lambda must be nonnegative");
  const Eigen::Index m = a.rows(), n = a.cols();
  Objective f = L1Residual(a, b);
  Regularizer g = L1Regularizer(lambda);

  lp::LinearProgram prog;
  const Eigen::Index vars = n + m + n;
  prog.objective = Point::Zero(vars);
  prog.objective.segment(n, m).setOnes();
  prog.objective.tail(n).setConstant(lambda);
  prog.free_variable.assign(static_cast<std::size_t>(vars), false);
  for (Eigen::Index j = 0; j < n; ++j) prog.free_variable[static_cast<std::size_t>(j)] = true;
  for (Eigen::Index i = 0; i < m; ++i) {
    Point up = Point::Zero(vars), down = Point::Zero(vars);
    up.head(n) = a.row(i).transpose();
    up[n + i] = -1.0;
    down.head(n) = -a.row(i).transpose();
    down[n + i] = -1.0;
    prog.constraints.push_back({up, lp::Sense::kLessEqual, b[i]});
    prog.constraints.push_back({down, lp::Sense::kLessEqual, -b[i]});
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    Point up = Point::Zero(vars), down = Point::Zero(vars);
    up[j] = 1.0;
    up[n + m + j] = -1.0;
    down[j] = -1.0;
    down[n + m + j] = -1.0;
    prog.constraints.push_back({up, lp::Sense::kLessEqual, 0.0});
    prog.constraints.push_back({down, lp::Sense::kLessEqual, 0.0});
  }
  Point x_star = detail::lp_or_throw(prog, n, "lad_l1");

  ProblemInstance p{"lad_l1", n, f, g, {}, {}, Point::Zero(n)};
  p.truth = detail::finalize(p.f, p.g, std::move(x_star), "lp");
  p.constants.zeta = std::max(a.rowwise().norm().sum(), 1.0);
  p.constants.rho = p.g.rho(n);
  return p;
}

/// Random desk-scale LAD instance: A uniform in [-1, 1], b = A x_true + uniform noise, x_true sparse.
inline ProblemInstance make_lad_l1_random(Eigen::Index rows, Eigen::Index cols, double lambda, std::uint64_t seed) {
  if (rows <= 0 || cols <= 0 || rows > 40 || cols > 20) throw ConfigError("lad_l1: desk scale requires rows <= 40, cols <= 20");
  Rng rng(seed);
  Matrix a = rng.uniform_matrix(rows, cols, -1.0, 1.0);
  Point x_true = Point::Zero(cols);
  for (Eigen::Index j = 0; j < cols; j += 2) x_true[j] = rng.uniform(-2.0, 2.0);
  Point b = a * x_true + rng.uniform_point(rows, -0.5, 0.5);
  return make_lad_l1(a, b, lambda);
}

/// f = max-affine, g = indicator(set); truth by epigraph LP (polyhedral sets) or penalized search (ball, dim <= 2).
inline ProblemInstance make_constrained_max_affine(const Matrix& a, const Point& b, const ConvexSet& set) {
  if (a.cols() != set.dim()) throw ConfigError("constrained_max_affine: set dimension mismatch");
  Objective f = MaxAffine(a, b);
  Regularizer g = SetIndicator(set);
  const Eigen::Index n = a.cols();
  const double lipschitz = a.rowwise().norm().maxCoeff();

  ProblemInstance p{"constrained_max_affine", n, f, g, {}, {}, detail::default_start(g, n)};
  if (auto rows = set.linear_constraints()) {
    Point x = detail::epigraph_lp(a, b, *rows, 0.0, "constrained_max_affine");
    p.truth = detail::finalize(p.f, p.g, std::move(x), "lp");
  } else {
    const auto& fn = p.f;
    Point x = detail::penalized_search([&](const Point& y) { return fn.value(y); }, lipschitz, set, n,
                                       detail::search_radius(set));
    p.truth = detail::finalize(p.f, p.g, std::move(x), "golden");
  }
  p.constants.zeta = lipschitz > 0.0 ? lipschitz : 1.0;
  p.constants.rho = 0.0;
  return p;
}

/// f = sum_i dist(., C_i), g = indicator(g_set) or 0; dim <= 2 so the search oracle applies.
inline ProblemInstance make_sum_of_distances(std::vector<ConvexSet> sets, std::optional<ConvexSet> g_set) {
  if (sets.empty()) throw ConfigError("sum_of_distances: at least one set required");
  const Eigen::Index n = sets.front().dim();
  if (n > 2) throw ConfigError("sum_of_distances: dimension must be at most 2 for the search oracle");
  if (g_set && g_set->dim() != n) throw ConfigError("sum_of_distances: g_set dimension mismatch");
  double radius = 1.0;
  for (const auto& s : sets) radius = std::max(radius, detail::search_radius(s));
  if (g_set) radius = std::max(radius, detail::search_radius(*g_set));
  const double count = static_cast<double>(sets.size());

  Objective f = SumOfDistances(std::move(sets));
  Regularizer g = g_set ? Regularizer(SetIndicator(*g_set)) : Regularizer(ZeroRegularizer{});
  ProblemInstance p{"sum_of_distances", n, f, g, {}, {}, detail::default_start(g, n)};
  const auto& fn = p.f;
  Point x = detail::penalized_search([&](const Point& y) { return fn.value(y); }, count, g_set, n, radius);
  p.truth = detail::finalize(p.f, p.g, std::move(x), "golden");
  p.constants.zeta = count;
  p.constants.rho = 0.0;
  return p;
}

/// Extra simple term of the dualized problem.
struct DualL1 {};
struct DualBox {
  Point lower;
  Point upper;
};
using DualG0 = std::variant<std::monostate, DualL1, DualBox>;

/// f(x) = max_j [-h0(y_j) - sum_i x_i h_i(y_j)] over a finite candidate set, g = indicator(R^n_+) + lambda g0.
/// h_matrix(i, j) = h_i(y_j), h0_values(j) = h0(y_j).
inline ProblemInstance make_dual_finite(const Point& h0_values, const Matrix& h_matrix, double lambda, DualG0 g0 = {}) {
  if (h0_values.size() == 0 || h_matrix.cols() == 0) throw ConfigError("dual_finite: candidate set is empty");
  if (h_matrix.cols() != h0_values.size()) throw ConfigError("dual_finite: h_matrix columns must match h0_values");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("dual_finite: lambda must be nonnegative");
  const Eigen::Index n = h_matrix.rows();
  const Matrix rows = -h_matrix.transpose();
  const Point offsets = -h0_values;

  std::optional<Regularizer> g;
  std::vector<lp::LinearConstraint> set_rows = *ConvexSet::nonneg_orthant(n).linear_constraints();
  double linear_weight = 0.0;
  if (lambda > 0.0 && std::holds_alternative<DualL1>(g0)) {
    g = NonnegL1Regularizer(lambda);
    linear_weight = lambda;
  } else if (lambda > 0.0 && std::holds_alternative<DualBox>(g0)) {
    const auto& box = std::get<DualBox>(g0);
    auto set = ConvexSet::box(box.lower.cwiseMax(0.0), box.upper);
    set_rows = *set.linear_constraints();
    g = SetIndicator(set);
  } else {
    g = SetIndicator(ConvexSet::nonneg_orthant(n));
  }
  ProblemInstance p{"dual_finite", n, MaxAffine(rows, offsets), *g, {}, {}, detail::default_start(*g, n)};
  Point x = detail::epigraph_lp(rows, offsets, set_rows, linear_weight, "dual_finite");
  p.truth = detail::finalize(p.f, p.g, std::move(x), "lp");
  const double lipschitz = rows.rowwise().norm().maxCoeff();
  p.constants.zeta = lipschitz > 0.0 ? lipschitz : 1.0;
  p.constants.rho = p.g.rho(n);
  return p;
}

/// 1-D, g = 0, f = tangent envelope of sqrt(x^2 + 1) - x: infimum 0, never attained.
inline ProblemInstance make_unattained_inf() {
  ProblemInstance p{"unattained_inf", 1, TangentEnvelope{}, ZeroRegularizer{}, {}, {}, Point::Constant(1, 0.5)};
  p.truth.attained = false;
  p.truth.s_star = 0.0;
  p.truth.oracle = "closed_form";
  p.constants.zeta = 1.0;
  p.constants.rho = 0.0;
  return p;
}

}  // namespace gallery
}  // namespace pss
