#pragma once

#include <cstdint>
#include <random>

#include "pss/point.hpp"

namespace pss {

/// Platform-independent uniform draws: std::mt19937_64 output is fully specified by the
/// standard, the distribution classes are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Point uniform_point(Eigen::Index n, double lo, double hi) {
    Point x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = uniform(lo, hi);
    return x;
  }

  Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
    Matrix a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = uniform(lo, hi);
    }
    return a;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pss
