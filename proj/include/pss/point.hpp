#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pss/errors.hpp"

namespace pss {

/// Dense iterate in R^n.
using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Throws NonFiniteInput naming the first NaN/Inf coordinate of `x`.
inline void require_finite(const Point& x, const std::string& where) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw NonFiniteInput(where, static_cast<std::size_t>(i));
  }
}

inline void require_finite(const Matrix& a, const std::string& where) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a.data()[i])) throw NonFiniteInput(where, static_cast<std::size_t>(i));
  }
}

inline void require_dim(const Point& x, Eigen::Index n, const std::string& where) {
  if (x.size() != n) {
    throw ConfigError(where + ": expected dimension " + std::to_string(n) + ", got " +
                      std::to_string(x.size()));
  }
}

/// sign with sign(0) = 0.
inline double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

inline Point sign0(const Point& x) { return x.unaryExpr([](double v) { return sign0(v); }); }

/// Membership / inclusion tolerance: 1e-8 absolute plus 1e-8 * (1 + ||z||).
inline double default_tolerance(const Point& z) { return 1e-8 + 1e-8 * (1.0 + z.norm()); }

inline Point to_point(const std::vector<double>& v) {
  return Eigen::Map<const Point>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_vector(const Point& x) { return {x.data(), x.data() + x.size()}; }

}  // namespace pss
