#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pss/errors.hpp"
#include "pss/lp.hpp"
#include "pss/point.hpp"

namespace pss {

/// Closed convex sets with exact projections.
namespace sets {

struct Box {
  Point lower;
  Point upper;
};

struct Ball {
  Point center;
  double radius = 1.0;
};

/// {x : <normal, x> <= offset}
struct Halfspace {
  Point normal;
  double offset = 0.0;
};

/// {x : A x = b}, A with full row rank.
struct AffineEquality {
  Matrix a;
  Point b;
};

/// {x >= 0 : sum(x) = radius}
struct Simplex {
  Eigen::Index dim = 1;
  double radius = 1.0;
};

struct NonnegOrthant {
  Eigen::Index dim = 1;
};

}  // namespace sets

/// A validated closed convex set; immutable after construction.
class ConvexSet {
 public:
  using Spec = std::variant<sets::Box, sets::Ball, sets::Halfspace, sets::AffineEquality,
                            sets::Simplex, sets::NonnegOrthant>;

  explicit ConvexSet(Spec spec) : spec_(std::move(spec)) { validate(); }

  static ConvexSet box(Point lower, Point upper) { return ConvexSet(sets::Box{std::move(lower), std::move(upper)}); }
  static ConvexSet ball(Point center, double radius) { return ConvexSet(sets::Ball{std::move(center), radius}); }
  static ConvexSet halfspace(Point normal, double offset) { return ConvexSet(sets::Halfspace{std::move(normal), offset}); }
  static ConvexSet affine(Matrix a, Point b) { return ConvexSet(sets::AffineEquality{std::move(a), std::move(b)}); }
  static ConvexSet simplex(Eigen::Index dim, double radius = 1.0) { return ConvexSet(sets::Simplex{dim, radius}); }
  static ConvexSet nonneg_orthant(Eigen::Index dim) { return ConvexSet(sets::NonnegOrthant{dim}); }

  const Spec& spec() const { return spec_; }
  Eigen::Index dim() const { return dim_; }

  std::string kind() const {
    return std::visit(
        [](const auto& s) -> std::string {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, sets::Box>) return "box";
          if constexpr (std::is_same_v<T, sets::Ball>) return "ball";
          if constexpr (std::is_same_v<T, sets::Halfspace>) return "halfspace";
          if constexpr (std::is_same_v<T, sets::AffineEquality>) return "affine";
          if constexpr (std::is_same_v<T, sets::Simplex>) return "simplex";
          if constexpr (std::is_same_v<T, sets::NonnegOrthant>) return "nonneg_orthant";
        },
        spec_);
  }

  /// Orthogonal projection P_C(z).
  Point project(const Point& z) const {
    require_dim(z, dim_, "project(" + kind() + ")");
    require_finite(z, "project(" + kind() + ")");
    return std::visit([&](const auto& s) { return project_impl(s, z); }, spec_);
  }

  bool contains(const Point& x, double tol) const {
    if (x.size() != dim_) return false;
    return std::visit([&](const auto& s) { return contains_impl(s, x, tol); }, spec_);
  }

  /// w in N_C(x) to tolerance; false when x is not in C.
  bool in_normal_cone(const Point& w, const Point& x, double tol) const {
    if (w.size() != dim_ || !contains(x, tol)) return false;
    return std::visit([&](const auto& s) { return normal_cone_impl(s, w, x, tol); }, spec_);
  }

  double distance(const Point& x) const { return (x - project(x)).norm(); }

  /// Linear description for LP oracles; nullopt for non-polyhedral sets.
  std::optional<std::vector<lp::LinearConstraint>> linear_constraints() const {
    using lp::LinearConstraint;
    using lp::Sense;
    std::vector<LinearConstraint> rows;
    auto unit = [&](Eigen::Index i, double v) {
      Point e = Point::Zero(dim_);
      e[i] = v;
      return e;
    };
    if (const auto* b = std::get_if<sets::Box>(&spec_)) {
      for (Eigen::Index i = 0; i < dim_; ++i) {
        if (std::isfinite(b->lower[i])) rows.push_back({unit(i, 1.0), Sense::kGreaterEqual, b->lower[i]});
        if (std::isfinite(b->upper[i])) rows.push_back({unit(i, 1.0), Sense::kLessEqual, b->upper[i]});
      }
    } else if (const auto* h = std::get_if<sets::Halfspace>(&spec_)) {
      rows.push_back({h->normal, Sense::kLessEqual, h->offset});
    } else if (const auto* a = std::get_if<sets::AffineEquality>(&spec_)) {
      for (Eigen::Index r = 0; r < a->a.rows(); ++r) rows.push_back({a->a.row(r).transpose(), Sense::kEqual, a->b[r]});
    } else if (const auto* s = std::get_if<sets::Simplex>(&spec_)) {
      for (Eigen::Index i = 0; i < dim_; ++i) rows.push_back({unit(i, 1.0), Sense::kGreaterEqual, 0.0});
      rows.push_back({Point::Ones(dim_), Sense::kEqual, s->radius});
    } else if (std::holds_alternative<sets::NonnegOrthant>(spec_)) {
      for (Eigen::Index i = 0; i < dim_; ++i) rows.push_back({unit(i, 1.0), Sense::kGreaterEqual, 0.0});
    } else {
      return std::nullopt;
    }
    return rows;
  }

 private:
  void validate() {
    std::visit([this](const auto& s) { validate_impl(s); }, spec_);
  }

  void validate_impl(const sets::Box& s) {
    if (s.lower.size() != s.upper.size() || s.lower.size() == 0) throw ConfigError("box: bound dimension mismatch");
    for (Eigen::Index i = 0; i < s.lower.size(); ++i) {
      if (std::isnan(s.lower[i]) || std::isnan(s.upper[i])) throw NonFiniteInput("box bounds", static_cast<std::size_t>(i));
      if (s.lower[i] > s.upper[i]) throw ConfigError("box: empty (lower > upper at coordinate " + std::to_string(i) + ")");
    }
    dim_ = s.lower.size();
  }
  void validate_impl(const sets::Ball& s) {
    require_finite(s.center, "ball center");
    if (!(s.radius > 0.0) || !std::isfinite(s.radius)) throw ConfigError("ball: radius must be positive");
    if (s.center.size() == 0) throw ConfigError("ball: empty center");
    dim_ = s.center.size();
  }
  void validate_impl(const sets::Halfspace& s) {
    require_finite(s.normal, "halfspace normal");
    if (s.normal.size() == 0 || s.normal.norm() == 0.0) throw ConfigError("halfspace: normal must be nonzero");
    if (!std::isfinite(s.offset)) throw ConfigError("halfspace: offset must be finite");
    dim_ = s.normal.size();
  }
  void validate_impl(const sets::AffineEquality& s) {
    require_finite(s.a, "affine A");
    require_finite(s.b, "affine b");
    if (s.a.rows() == 0 || s.a.cols() == 0 || s.a.rows() != s.b.size()) throw ConfigError("affine: dimension mismatch");
    Eigen::FullPivLU<Matrix> lu(s.a);
    if (lu.rank() != s.a.rows()) throw ConfigError("affine: rows of A must be linearly independent");
    gram_ = (s.a * s.a.transpose()).ldlt();
    dim_ = s.a.cols();
  }
  void validate_impl(const sets::Simplex& s) {
    if (s.dim <= 0) throw ConfigError("simplex: dimension must be positive");
    if (!(s.radius > 0.0) || !std::isfinite(s.radius)) throw ConfigError("simplex: radius must be positive");
    dim_ = s.dim;
  }
  void validate_impl(const sets::NonnegOrthant& s) {
    if (s.dim <= 0) throw ConfigError("nonneg_orthant: dimension must be positive");
    dim_ = s.dim;
  }

  Point project_impl(const sets::Box& s, const Point& z) const { return z.cwiseMax(s.lower).cwiseMin(s.upper); }
  Point project_impl(const sets::Ball& s, const Point& z) const {
    const Point d = z - s.center;
    const double n = d.norm();
    if (n <= s.radius) return z;
    return s.center + d * (s.radius / n);
  }
  Point project_impl(const sets::Halfspace& s, const Point& z) const {
    const double excess = s.normal.dot(z) - s.offset;
    if (excess <= 0.0) return z;
    return z - s.normal * (excess / s.normal.squaredNorm());
  }
  Point project_impl(const sets::AffineEquality& s, const Point& z) const {
    const Point r = s.a * z - s.b;
    return z - s.a.transpose() * gram_.solve(r);
  }
  Point project_impl(const sets::Simplex& s, const Point& z) const {
    // Sort-based threshold: theta = (sum_{j<=rho} u_j - r) / rho for the largest feasible rho.
    std::vector<double> u(z.data(), z.data() + z.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      cumulative += u[j];
      const double t = (cumulative - s.radius) / static_cast<double>(j + 1);
      if (u[j] - t > 0.0) theta = t;
    }
    return (z.array() - theta).max(0.0).matrix();
  }
  Point project_impl(const sets::NonnegOrthant&, const Point& z) const { return z.cwiseMax(0.0); }

  bool contains_impl(const sets::Box& s, const Point& x, double tol) const {
    return ((x - s.lower).array() >= -tol).all() && ((s.upper - x).array() >= -tol).all();
  }
  bool contains_impl(const sets::Ball& s, const Point& x, double tol) const { return (x - s.center).norm() <= s.radius + tol; }
  bool contains_impl(const sets::Halfspace& s, const Point& x, double tol) const {
    return s.normal.dot(x) - s.offset <= tol * s.normal.norm();
  }
  bool contains_impl(const sets::AffineEquality& s, const Point& x, double tol) const {
    return (s.a * x - s.b).norm() <= tol * std::max(1.0, s.a.norm());
  }
  bool contains_impl(const sets::Simplex& s, const Point& x, double tol) const {
    return (x.array() >= -tol).all() && std::abs(x.sum() - s.radius) <= tol * std::sqrt(static_cast<double>(x.size()));
  }
  bool contains_impl(const sets::NonnegOrthant&, const Point& x, double tol) const { return (x.array() >= -tol).all(); }

  bool normal_cone_impl(const sets::Box& s, const Point& w, const Point& x, double tol) const {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const bool at_lower = x[i] - s.lower[i] <= tol;
      const bool at_upper = s.upper[i] - x[i] <= tol;
      if (at_lower && at_upper) continue;
      if (at_lower && w[i] > tol) return false;
      if (at_upper && w[i] < -tol) return false;
      if (!at_lower && !at_upper && std::abs(w[i]) > tol) return false;
    }
    return true;
  }
  bool normal_cone_impl(const sets::Ball& s, const Point& w, const Point& x, double tol) const {
    const Point d = x - s.center;
    const double n = d.norm();
    if (n < s.radius - tol) return w.norm() <= tol;
    const Point dir = d / n;
    const double t = w.dot(dir);
    return t >= -tol && (w - t * dir).norm() <= tol;
  }
  bool normal_cone_impl(const sets::Halfspace& s, const Point& w, const Point& x, double tol) const {
    const double an = s.normal.norm();
    if (s.normal.dot(x) - s.offset < -tol * an) return w.norm() <= tol;
    const double t = w.dot(s.normal) / (an * an);
    return t * an >= -tol && (w - t * s.normal).norm() <= tol;
  }
  bool normal_cone_impl(const sets::AffineEquality& s, const Point& w, const Point&, double tol) const {
    const Point in_range = s.a.transpose() * gram_.solve(s.a * w);
    return (w - in_range).norm() <= tol;
  }
  bool normal_cone_impl(const sets::Simplex&, const Point& w, const Point& x, double tol) const {
    // N(x) = {mu * 1 - nu : nu >= 0, nu_i = 0 where x_i > 0}
    double mu = 0.0;
    int positive = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] > tol) {
        mu += w[i];
        ++positive;
      }
    }
    if (positive == 0) return false;
    mu /= positive;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] > tol ? std::abs(w[i] - mu) > tol : w[i] > mu + tol) return false;
    }
    return true;
  }
  bool normal_cone_impl(const sets::NonnegOrthant&, const Point& w, const Point& x, double tol) const {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] > tol ? std::abs(w[i]) > tol : w[i] > tol) return false;
    }
    return true;
  }

  Spec spec_;
  Eigen::Index dim_ = 0;
  Eigen::LDLT<Matrix> gram_;
};

}  // namespace pss
