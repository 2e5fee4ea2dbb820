#pragma once

#include <cmath>
#include <concepts>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pss/convex_set.hpp"
#include "pss/errors.hpp"
#include "pss/point.hpp"

namespace pss {

/// The f-side oracle: value plus one deterministic subgradient.
template <class F>
concept SubgradientOracle = requires(const F& f, const Point& x) {
  { f.value(x) } -> std::convertible_to<double>;
  { f.subgradient(x) } -> std::convertible_to<Point>;
  { f.in_domain(x) } -> std::convertible_to<bool>;
};

struct ValueAndSubgradient {
  double value = 0.0;
  Point u;
};

/// max_i (<a_i, x> + b_i) with u = a_j for the first maximizing row j.
inline ValueAndSubgradient subgrad_max_affine(const Matrix& a, const Point& b, const Point& x) {
  if (a.rows() == 0) throw ConfigError("max_affine: at least one row required");
  if (b.size() != a.rows() || x.size() != a.cols()) throw ConfigError("max_affine: dimension mismatch");
  require_finite(x, "max_affine");
  const Point values = a * x + b;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return {values[best], a.row(best).transpose()};
}

/// ||Ax - b||_1 with u = A^T sign(Ax - b), sign(0) = 0.
inline ValueAndSubgradient subgrad_l1_residual(const Matrix& a, const Point& b, const Point& x) {
  if (b.size() != a.rows() || x.size() != a.cols()) throw ConfigError("l1_residual: dimension mismatch");
  require_finite(x, "l1_residual");
  const Point r = a * x - b;
  return {r.lpNorm<1>(), a.transpose() * sign0(r)};
}

class ZeroFunction {
 public:
  double value(const Point& x) const {
    require_finite(x, "zero function");
    return 0.0;
  }
  Point subgradient(const Point& x) const { return Point::Zero(x.size()); }
  bool in_domain(const Point&) const { return true; }
  std::string describe() const { return "zero"; }
};

/// f = ||x||_1.
class L1Norm {
 public:
  double value(const Point& x) const {
    require_finite(x, "l1 norm");
    return x.lpNorm<1>();
  }
  Point subgradient(const Point& x) const {
    require_finite(x, "l1 norm");
    return sign0(x);
  }
  bool in_domain(const Point&) const { return true; }
  std::string describe() const { return "l1_norm"; }
};

class MaxAffine {
 public:
  MaxAffine(Matrix a, Point b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() == 0) throw ConfigError("max_affine: at least one row required");
    if (b_.size() != a_.rows()) throw ConfigError("max_affine: offsets size must match rows");
    require_finite(a_, "max_affine rows");
    require_finite(b_, "max_affine offsets");
  }
  const Matrix& rows() const { return a_; }
  const Point& offsets() const { return b_; }
  double value(const Point& x) const { return subgrad_max_affine(a_, b_, x).value; }
  Point subgradient(const Point& x) const { return subgrad_max_affine(a_, b_, x).u; }
  bool in_domain(const Point&) const { return true; }
  std::string describe() const { return "max_affine(" + std::to_string(a_.rows()) + " rows)"; }

 private:
  Matrix a_;
  Point b_;
};

class L1Residual {
 public:
  L1Residual(Matrix a, Point b) : a_(std::move(a)), b_(std::move(b)) {
    if (b_.size() != a_.rows() || a_.cols() == 0) throw ConfigError("l1_residual: dimension mismatch");
    require_finite(a_, "l1_residual A");
    require_finite(b_, "l1_residual b");
  }
  const Matrix& matrix() const { return a_; }
  const Point& rhs() const { return b_; }
  double value(const Point& x) const { return subgrad_l1_residual(a_, b_, x).value; }
  Point subgradient(const Point& x) const { return subgrad_l1_residual(a_, b_, x).u; }
  bool in_domain(const Point&) const { return true; }
  std::string describe() const { return "l1_residual"; }

 private:
  Matrix a_;
  Point b_;
};

/// f = sum_i dist(x, C_i); subgradient (x - P_i x) / dist_i off C_i and 0 on it.
class SumOfDistances {
 public:
  explicit SumOfDistances(std::vector<ConvexSet> sets) : sets_(std::move(sets)) {
    if (sets_.empty()) throw ConfigError("sum_of_distances: at least one set required");
    for (const auto& s : sets_) {
      if (s.dim() != sets_.front().dim()) throw ConfigError("sum_of_distances: sets must share a dimension");
    }
  }
  const std::vector<ConvexSet>& sets() const { return sets_; }
  double value(const Point& x) const {
    double total = 0.0;
    for (const auto& s : sets_) total += s.distance(x);
    return total;
  }
  Point subgradient(const Point& x) const {
    Point u = Point::Zero(x.size());
    for (const auto& s : sets_) {
      const Point r = x - s.project(x);
      const double d = r.norm();
      if (d > 0.0) u += r / d;
    }
    return u;
  }
  bool in_domain(const Point&) const { return true; }
  std::string describe() const { return "sum_of_distances(" + std::to_string(sets_.size()) + " sets)"; }

 private:
  std::vector<ConvexSet> sets_;
};

/// 1-D supremum of the tangents of h(x) = sqrt(x^2 + 1) - x at t = 0 and t = 2^j, j >= min_exponent.
/// Positive everywhere with infimum 0 approached as x -> +inf and never attained. Only the
/// two grid tangents bracketing x can be active, so evaluation is exact.
class TangentEnvelope {
 public:
  explicit TangentEnvelope(int min_exponent = -4) : min_exponent_(min_exponent) {}

  static double h(double t) { return 1.0 / (std::sqrt(t * t + 1.0) + t); }
  static double slope(double t) { return -h(t) / std::sqrt(t * t + 1.0); }
  static double tangent(double t, double x) { return h(t) + slope(t) * (x - t); }

  double value(const Point& x) const { return active(x).first; }
  Point subgradient(const Point& x) const { return Point::Constant(1, slope(active(x).second)); }
  bool in_domain(const Point&) const { return true; }
  std::string describe() const { return "tangent_envelope"; }
  double infimum() const { return 0.0; }

  /// (value, tangent point) with ties resolved toward the smaller tangent point.
  std::pair<double, double> active(const Point& x) const {
    if (x.size() != 1) throw ConfigError("tangent_envelope: 1-D only");
    require_finite(x, "tangent_envelope");
    const double v = x[0];
    const double t_min = std::ldexp(1.0, min_exponent_);
    std::vector<double> candidates{0.0};
    if (v > 0.0) {
      int e = 0;
      std::frexp(v, &e);  // v in [2^(e-1), 2^e)
      const int lo = std::max(e - 1, min_exponent_);
      candidates.push_back(std::ldexp(1.0, lo));
      candidates.push_back(std::ldexp(1.0, std::max(e, min_exponent_)));
      if (v < t_min) candidates.push_back(t_min);
    }
    double best_t = candidates.front();
    double best = tangent(best_t, v);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      const double val = tangent(candidates[i], v);
      if (val > best || (val == best && candidates[i] < best_t)) {
        best = val;
        best_t = candidates[i];
      }
    }
    return {best, best_t};
  }

 private:
  int min_exponent_;
};

/// Closed sum type over the shipped f oracles.
class Objective {
 public:
  using Variant = std::variant<ZeroFunction, L1Norm, MaxAffine, L1Residual, SumOfDistances, TangentEnvelope>;

  template <class T>
    requires std::constructible_from<Variant, T>
  Objective(T f) : impl_(std::move(f)) {}

  const Variant& variant() const { return impl_; }

  double value(const Point& x) const { return std::visit([&](const auto& f) { return f.value(x); }, impl_); }
  Point subgradient(const Point& x) const { return std::visit([&](const auto& f) { return f.subgradient(x); }, impl_); }
  bool in_domain(const Point& x) const { return std::visit([&](const auto& f) { return f.in_domain(x); }, impl_); }
  std::string describe() const { return std::visit([](const auto& f) { return f.describe(); }, impl_); }

 private:
  Variant impl_;
};

}  // namespace pss
