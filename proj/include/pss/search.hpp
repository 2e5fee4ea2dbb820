#pragma once

// Derivative-free minimization of convex functions of one or two variables.

#include <cmath>
#include <functional>
#include <utility>

#include "pss/errors.hpp"
#include "pss/point.hpp"

namespace pss::search {

struct ScalarMin {
  double argmin = 0.0;
  double value = 0.0;
};

/// Golden-section search on [lo, hi] for a convex (hence unimodal) function.
inline ScalarMin golden_section(const std::function<double(double)>& fn, double lo, double hi, int iterations = 120) {
  if (!(lo <= hi)) throw ConfigError("golden_section: empty interval");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int i = 0; i < iterations && b - a > 0.0; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  ScalarMin best{a, fn(a)};
  for (double t : {b, c, d, 0.5 * (a + b)}) {
    const double v = fn(t);
    if (v < best.value) best = {t, v};
  }
  return best;
}

struct PointMin {
  Point argmin;
  double value = 0.0;
};

/// Minimizes a convex function on the box [lo, hi]^dim for dim in {1, 2} by nested golden sections.
inline PointMin nested_golden(const std::function<double(const Point&)>& fn, Eigen::Index dim, double lo, double hi,
                              int iterations = 100) {
  if (dim == 1) {
    Point x(1);
    auto r = golden_section([&](double t) { x[0] = t; return fn(x); }, lo, hi, iterations);
    return {Point::Constant(1, r.argmin), r.value};
  }
  if (dim != 2) throw ConfigError("nested_golden: dimension must be 1 or 2");
  auto inner = [&](double x0) {
    Point x(2);
    x[0] = x0;
    return golden_section([&](double t) { x[1] = t; return fn(x); }, lo, hi, iterations);
  };
  auto outer = golden_section([&](double x0) { return inner(x0).value; }, lo, hi, iterations);
  const ScalarMin in = inner(outer.argmin);
  Point x(2);
  x << outer.argmin, in.argmin;
  return {x, in.value};
}

}  // namespace pss::search
