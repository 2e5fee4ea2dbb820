#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <variant>

#include "pss/convex_set.hpp"
#include "pss/errors.hpp"
#include "pss/point.hpp"

namespace pss {

/// The g-side oracle: exact prox, subdifferential membership, and a bounded subgradient selection.
template <class G>
concept ProximalOracle = requires(const G& g, const Point& x, double alpha, double tol) {
  { g.value(x) } -> std::convertible_to<double>;
  { g.in_domain(x) } -> std::convertible_to<bool>;
  { g.prox(alpha, x) } -> std::convertible_to<Point>;
  { g.in_subdifferential(x, x, tol) } -> std::convertible_to<bool>;
  { g.bounded_subgradient(x) } -> std::convertible_to<Point>;
  { g.rho(Eigen::Index{}) } -> std::convertible_to<double>;
};

/// Tolerance used for dom(g) membership of iterates produced by floating-point projections.
inline double domain_tolerance(const Point& x) { return 1e-9 * (1.0 + x.norm()); }

/// Componentwise soft threshold: the minimizer of lambda*||y||_1 + ||y - z||^2 / (2 alpha).
inline Point prox_l1(double alpha, double lambda, const Point& z) {
  if (!(alpha > 0.0)) throw ConfigError("prox_l1: alpha must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("prox_l1: lambda must be nonnegative");
  require_finite(z, "prox_l1");
  const double t = alpha * lambda;
  return z.unaryExpr([t](double v) { return sign0(v) * std::max(std::abs(v) - t, 0.0); });
}

inline Point prox_indicator(const ConvexSet& set, const Point& z) { return set.project(z); }

/// u_i = sign(x_i) with sign(0) = 0; an element of the l1 subdifferential.
inline Point subgrad_l1(const Point& x) {
  require_finite(x, "subgrad_l1");
  return sign0(x);
}

/// g == 0.
class ZeroRegularizer {
 public:
  double value(const Point& x) const {
    require_finite(x, "zero regularizer");
    return 0.0;
  }
  bool in_domain(const Point&) const { return true; }
  Point prox(double alpha, const Point& z) const {
    if (!(alpha > 0.0)) throw ConfigError("prox: alpha must be positive");
    require_finite(z, "prox(zero)");
    return z;
  }
  bool in_subdifferential(const Point& w, const Point&, double tol) const { return w.norm() <= tol; }
  Point bounded_subgradient(const Point& x) const { return Point::Zero(x.size()); }
  double rho(Eigen::Index) const { return 0.0; }
  std::string describe() const { return "zero"; }
};

/// g = lambda * ||x||_1.
class L1Regularizer {
 public:
  explicit L1Regularizer(double lambda) : lambda_(lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("l1 regularizer: lambda must be nonnegative");
  }
  double lambda() const { return lambda_; }
  double value(const Point& x) const {
    require_finite(x, "l1 regularizer");
    return lambda_ * x.lpNorm<1>();
  }
  bool in_domain(const Point&) const { return true; }
  Point prox(double alpha, const Point& z) const { return prox_l1(alpha, lambda_, z); }
  bool in_subdifferential(const Point& w, const Point& x, double tol) const {
    if (w.size() != x.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::abs(x[i]) <= tol) {
        if (std::abs(w[i]) > lambda_ + tol) return false;
      } else if (std::abs(w[i] - lambda_ * sign0(x[i])) > tol) {
        return false;
      }
    }
    return true;
  }
  Point bounded_subgradient(const Point& x) const { return lambda_ * subgrad_l1(x); }
  double rho(Eigen::Index dim) const { return lambda_ * std::sqrt(static_cast<double>(dim)); }
  std::string describe() const { return "l1(lambda=" + std::to_string(lambda_) + ")"; }

 private:
  double lambda_;
};

/// g = indicator of a closed convex set; prox is the projection.
class SetIndicator {
 public:
  explicit SetIndicator(ConvexSet set) : set_(std::move(set)) {}
  const ConvexSet& set() const { return set_; }
  double value(const Point& x) const {
    require_finite(x, "indicator");
    return in_domain(x) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  bool in_domain(const Point& x) const { return set_.contains(x, domain_tolerance(x)); }
  Point prox(double alpha, const Point& z) const {
    if (!(alpha > 0.0)) throw ConfigError("prox: alpha must be positive");
    return set_.project(z);
  }
  bool in_subdifferential(const Point& w, const Point& x, double tol) const { return set_.in_normal_cone(w, x, tol); }
  /// Zero lies in every normal cone at a feasible point.
  Point bounded_subgradient(const Point& x) const { return Point::Zero(x.size()); }
  double rho(Eigen::Index) const { return 0.0; }
  std::string describe() const { return "indicator(" + set_.kind() + ")"; }

 private:
  ConvexSet set_;
};

/// g = indicator(R^n_+) + lambda * ||x||_1, i.e. lambda * sum(x) on the orthant.
class NonnegL1Regularizer {
 public:
  explicit NonnegL1Regularizer(double lambda) : lambda_(lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("nonneg l1 regularizer: lambda must be nonnegative");
  }
  double lambda() const { return lambda_; }
  double value(const Point& x) const {
    require_finite(x, "nonneg l1 regularizer");
    if (!in_domain(x)) return std::numeric_limits<double>::infinity();
    return lambda_ * x.lpNorm<1>();
  }
  bool in_domain(const Point& x) const { return (x.array() >= -domain_tolerance(x)).all(); }
  Point prox(double alpha, const Point& z) const {
    if (!(alpha > 0.0)) throw ConfigError("prox: alpha must be positive");
    require_finite(z, "prox(nonneg l1)");
    return (z.array() - alpha * lambda_).max(0.0).matrix();
  }
  bool in_subdifferential(const Point& w, const Point& x, double tol) const {
    if (w.size() != x.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] < -tol) return false;
      if (x[i] > tol ? std::abs(w[i] - lambda_) > tol : w[i] > lambda_ + tol) return false;
    }
    return true;
  }
  Point bounded_subgradient(const Point& x) const {
    return x.unaryExpr([this](double v) { return v > 0.0 ? lambda_ : 0.0; });
  }
  double rho(Eigen::Index dim) const { return lambda_ * std::sqrt(static_cast<double>(dim)); }
  std::string describe() const { return "nonneg_l1(lambda=" + std::to_string(lambda_) + ")"; }

 private:
  double lambda_;
};

/// Closed sum type over the shipped regularizers.
class Regularizer {
 public:
  using Variant = std::variant<ZeroRegularizer, L1Regularizer, SetIndicator, NonnegL1Regularizer>;

  Regularizer(ZeroRegularizer r) : impl_(std::move(r)) {}
  Regularizer(L1Regularizer r) : impl_(std::move(r)) {}
  Regularizer(SetIndicator r) : impl_(std::move(r)) {}
  Regularizer(NonnegL1Regularizer r) : impl_(std::move(r)) {}

  const Variant& variant() const { return impl_; }

  double value(const Point& x) const { return std::visit([&](const auto& g) { return g.value(x); }, impl_); }
  bool in_domain(const Point& x) const { return std::visit([&](const auto& g) { return g.in_domain(x); }, impl_); }
  Point prox(double alpha, const Point& z) const { return std::visit([&](const auto& g) { return g.prox(alpha, z); }, impl_); }
  bool in_subdifferential(const Point& w, const Point& x, double tol) const {
    return std::visit([&](const auto& g) { return g.in_subdifferential(w, x, tol); }, impl_);
  }
  Point bounded_subgradient(const Point& x) const {
    return std::visit([&](const auto& g) { return g.bounded_subgradient(x); }, impl_);
  }
  double rho(Eigen::Index dim) const { return std::visit([&](const auto& g) { return g.rho(dim); }, impl_); }
  std::string describe() const { return std::visit([](const auto& g) { return g.describe(); }, impl_); }

 private:
  Variant impl_;
};

/// Checks (z - prox(alpha, z)) / alpha in dg(prox(alpha, z)).
template <ProximalOracle G>
bool check_optimality_inclusion(const G& g, double alpha, const Point& z, double tol) {
  if (!(alpha > 0.0)) throw ConfigError("check_optimality_inclusion: alpha must be positive");
  const Point p = g.prox(alpha, z);
  return g.in_subdifferential((z - p) / alpha, p, tol);
}

}  // namespace pss
