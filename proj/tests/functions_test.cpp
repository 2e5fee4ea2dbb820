#include <gtest/gtest.h>

#include "pss/functions.hpp"
#include "pss/random.hpp"

namespace {

using pss::Matrix;
using pss::Point;

Point pt(std::initializer_list<double> v) { return pss::to_point(std::vector<double>(v)); }

std::vector<std::pair<std::string, pss::Objective>> objectives() {
  pss::Rng rng(21);
  const Matrix a = rng.uniform_matrix(6, 3, -1.0, 1.0);
  const Point b = rng.uniform_point(6, -1.0, 1.0);
  return {
      {"l1_norm", pss::L1Norm{}},
      {"max_affine", pss::MaxAffine(a, b)},
      {"l1_residual", pss::L1Residual(a, b)},
      {"sum_of_distances",
       pss::SumOfDistances({pss::ConvexSet::ball(pt({1, 0, 0}), 0.5), pss::ConvexSet::box(pt({-2, -2, -2}), pt({-1, 0, 0}))})},
  };
}

TEST(Subgradient, SatisfiesTheSubgradientInequality) {
  pss::Rng rng(22);
  for (const auto& [name, f] : objectives()) {
    for (int i = 0; i < 1000; ++i) {
      const Point x = rng.uniform_point(3, -3.0, 3.0);
      const Point y = rng.uniform_point(3, -3.0, 3.0);
      const Point u = f.subgradient(x);
      EXPECT_GE(f.value(y), f.value(x) + u.dot(y - x) - 1e-12 * (1.0 + std::abs(f.value(y)))) << name;
    }
  }
}

TEST(Subgradient, KinkSelectionsStillSatisfyTheInequality) {
  // Points exactly on kinks: zero coordinates for the l1 norm, ties for max-affine.
  pss::Rng rng(23);
  Matrix a(2, 2);
  a << 1, 0, 0, 1;
  const pss::MaxAffine f(a, Point::Zero(2));
  const pss::L1Norm l1;
  for (int i = 0; i < 500; ++i) {
    const double t = rng.uniform(-2.0, 2.0);
    const Point x = pt({t, t});
    const Point y = rng.uniform_point(2, -3.0, 3.0);
    EXPECT_GE(f.value(y), f.value(x) + f.subgradient(x).dot(y - x) - 1e-12);
    const Point z = pt({0.0, t});
    EXPECT_GE(l1.value(y), l1.value(z) + l1.subgradient(z).dot(y - z) - 1e-12);
  }
}

TEST(MaxAffine, TiesPickTheFirstMaximizer) {
  Matrix a(3, 1);
  a << 1, -1, 2;
  const auto r = pss::subgrad_max_affine(a, pt({0.0, 0.0, -1.0}), pt({1.0}));
  EXPECT_DOUBLE_EQ(r.value, 1.0);
  EXPECT_DOUBLE_EQ(r.u[0], 1.0);
}

TEST(MaxAffine, AbsoluteValueFromTwoPieces) {
  Matrix a(2, 1);
  a << 1, -1;
  const pss::MaxAffine f(a, Point::Zero(2));
  EXPECT_DOUBLE_EQ(f.value(pt({-3.0})), 3.0);
  EXPECT_DOUBLE_EQ(f.subgradient(pt({-3.0}))[0], -1.0);
}

TEST(L1Residual, SubgradientIsSignedRowSum) {
  Matrix a(2, 2);
  a << 1, 2, -1, 1;
  const auto r = pss::subgrad_l1_residual(a, pt({0.0, 5.0}), pt({1.0, 1.0}));
  EXPECT_DOUBLE_EQ(r.value, 3.0 + 5.0);
  EXPECT_EQ(r.u, pt({1.0 + 1.0, 2.0 - 1.0}));
}

TEST(SumOfDistances, ZeroSubgradientInsideAllSets) {
  const pss::SumOfDistances f({pss::ConvexSet::ball(pt({0, 0}), 1.0), pss::ConvexSet::box(pt({-0.5, -0.5}), pt({2, 2}))});
  const Point x = pt({0.1, 0.2});
  EXPECT_EQ(f.subgradient(x), Point::Zero(2));
  EXPECT_EQ(f.value(x), 0.0);
}

TEST(SumOfDistances, UnitNormalOutside) {
  const pss::SumOfDistances f({pss::ConvexSet::box(pt({0.0}), pt({1.0})), pss::ConvexSet::box(pt({3.0}), pt({4.0}))});
  EXPECT_DOUBLE_EQ(f.value(pt({2.0})), 2.0);
  EXPECT_DOUBLE_EQ(f.subgradient(pt({2.0}))[0], 0.0);
  EXPECT_DOUBLE_EQ(f.subgradient(pt({5.0}))[0], 2.0);
}

TEST(TangentEnvelope, ValueAtZeroAndPositivity) {
  const pss::TangentEnvelope f;
  EXPECT_DOUBLE_EQ(f.value(pt({0.0})), 1.0);
  double prev = f.value(pt({-10.0}));
  for (double x = -10.0; x <= 1e6; x = x < 1 ? x + 0.25 : x * 1.7) {
    const double v = f.value(pt({x}));
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, prev + 1e-15);
    EXPECT_LE(f.subgradient(pt({x}))[0], 0.0);
    prev = v;
  }
}

TEST(TangentEnvelope, MatchesExplicitMaximumOverTangents) {
  // Brute force over all tangent points 0 and 2^j, j = -4..70.
  const pss::TangentEnvelope f;
  auto h = [](double t) { return std::sqrt(t * t + 1.0) - t; };
  auto slope = [](double t) { return t / std::sqrt(t * t + 1.0) - 1.0; };
  pss::Rng rng(24);
  for (int i = 0; i < 2000; ++i) {
    const double x = i % 2 ? rng.uniform(-5.0, 5.0) : std::exp(rng.uniform(-3.0, 12.0));
    double best = h(0.0) + slope(0.0) * x;
    for (int j = -4; j <= 70; ++j) {
      const double t = std::ldexp(1.0, j);
      if (t > 1e7) break;
      best = std::max(best, h(t) + slope(t) * (x - t));
    }
    EXPECT_NEAR(f.value(pt({x})), best, 1e-9 * (1.0 + best)) << x;
  }
}

TEST(TangentEnvelope, StaysBelowTheSmoothFunction) {
  const pss::TangentEnvelope f;
  for (double x : {0.0, 0.3, 1.0, 7.0, 1e3, 1e8}) {
    EXPECT_LE(f.value(pt({x})), std::sqrt(x * x + 1.0) - x + 1e-12 * (1.0 + x));
  }
}

TEST(Objective, RejectsNonFiniteInput) {
  const pss::Objective f = pss::L1Norm{};
  EXPECT_THROW(f.value(pt({std::numeric_limits<double>::infinity()})), pss::NonFiniteInput);
}

}  // namespace
