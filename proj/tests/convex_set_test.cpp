#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pss/convex_set.hpp"
#include "pss/random.hpp"

namespace {

using pss::ConvexSet;
using pss::Point;

Point pt(std::initializer_list<double> v) { return pss::to_point(std::vector<double>(v)); }

std::vector<ConvexSet> sample_sets() {
  Eigen::MatrixXd a(1, 3);
  a << 1.0, -1.0, 2.0;
  return {ConvexSet::box(pt({-1, 0, 2}), pt({1, 0.5, 3})), ConvexSet::ball(pt({1, -1, 0}), 2.0),
          ConvexSet::halfspace(pt({1, 2, -1}), 0.5), ConvexSet::affine(a, pt({1.0})), ConvexSet::simplex(3, 1.0),
          ConvexSet::nonneg_orthant(3)};
}

TEST(ConvexSet, RejectsDegenerateSpecs) {
  EXPECT_THROW(ConvexSet::box(pt({1.0}), pt({0.0})), pss::ConfigError);
  EXPECT_THROW(ConvexSet::ball(pt({0.0}), 0.0), pss::ConfigError);
  EXPECT_THROW(ConvexSet::halfspace(pt({0.0, 0.0}), 1.0), pss::ConfigError);
  Eigen::MatrixXd rank_deficient(2, 2);
  rank_deficient << 1, 2, 2, 4;
  EXPECT_THROW(ConvexSet::affine(rank_deficient, pt({1.0, 2.0})), pss::ConfigError);
  EXPECT_THROW(ConvexSet::simplex(2, -1.0), pss::ConfigError);
}

TEST(ConvexSet, ProjectionIsIdempotentAndFeasible) {
  pss::Rng rng(3);
  for (const auto& s : sample_sets()) {
    for (int i = 0; i < 500; ++i) {
      const Point z = rng.uniform_point(3, -5.0, 5.0);
      const Point p = s.project(z);
      EXPECT_TRUE(s.contains(p, 1e-10)) << s.kind();
      EXPECT_LE((s.project(p) - p).norm(), 1e-12) << s.kind();
    }
  }
}

TEST(ConvexSet, ProjectionSatisfiesVariationalInequality) {
  // <z - Pz, y - Pz> <= 0 for members y; members drawn by projecting random points.
  pss::Rng rng(4);
  for (const auto& s : sample_sets()) {
    for (int i = 0; i < 200; ++i) {
      const Point z = rng.uniform_point(3, -5.0, 5.0);
      const Point p = s.project(z);
      for (int j = 0; j < 10; ++j) {
        const Point y = s.project(rng.uniform_point(3, -5.0, 5.0));
        EXPECT_LE((z - p).dot(y - p), 1e-10 * (1.0 + z.squaredNorm())) << s.kind();
      }
    }
  }
}

TEST(ConvexSet, ResidualLiesInNormalCone) {
  pss::Rng rng(6);
  for (const auto& s : sample_sets()) {
    for (int i = 0; i < 300; ++i) {
      const Point z = rng.uniform_point(3, -5.0, 5.0);
      const Point p = s.project(z);
      EXPECT_TRUE(s.in_normal_cone(z - p, p, 1e-9)) << s.kind();
    }
  }
}

TEST(ConvexSet, NormalConeRejectsInwardVectors) {
  const auto box = ConvexSet::box(pt({0.0, 0.0}), pt({1.0, 1.0}));
  EXPECT_TRUE(box.in_normal_cone(pt({1.0, 0.0}), pt({1.0, 0.5}), 1e-12));
  EXPECT_FALSE(box.in_normal_cone(pt({-1.0, 0.0}), pt({1.0, 0.5}), 1e-12));
  EXPECT_FALSE(box.in_normal_cone(pt({0.0, 1.0}), pt({1.0, 0.5}), 1e-12));
  EXPECT_TRUE(box.in_normal_cone(pt({0.0, 0.0}), pt({0.5, 0.5}), 1e-12));
  EXPECT_FALSE(box.in_normal_cone(pt({0.0, 0.0}), pt({2.0, 0.5}), 1e-12));
}

TEST(ConvexSet, SimplexProjectionMatchesParametrizedSearch) {
  const auto simplex = ConvexSet::simplex(2, 1.0);
  pss::Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const Point z = rng.uniform_point(2, -3.0, 3.0);
    const double t = oracle::refine_line_min(
        [&](double s) { return (pt({s, 1.0 - s}) - z).squaredNorm(); }, 0.0, 1.0);
    EXPECT_LE((simplex.project(z) - pt({t, 1.0 - t})).norm(), 1e-7);
  }
}

TEST(ConvexSet, BallProjectionMatchesBoundarySearch) {
  const auto ball = ConvexSet::ball(pt({0.5, -0.5}), 1.5);
  pss::Rng rng(9);
  for (int i = 0; i < 30; ++i) {
    const Point z = rng.uniform_point(2, -4.0, 4.0);
    const Point g = oracle::circle_nearest(pt({0.5, -0.5}), 1.5, z);
    EXPECT_LE((ball.project(z) - g).norm(), 1e-6);
  }
}

TEST(ConvexSet, LinearRowsDescribeTheSameSet) {
  pss::Rng rng(10);
  for (const auto& s : sample_sets()) {
    const auto rows = s.linear_constraints();
    if (!rows) {
      EXPECT_EQ(s.kind(), "ball");
      continue;
    }
    for (int i = 0; i < 200; ++i) {
      const Point x = rng.uniform_point(3, -2.0, 2.0);
      bool inside = true;
      for (const auto& c : *rows) {
        const double v = c.coeffs.dot(x);
        if (c.sense == pss::lp::Sense::kLessEqual) inside = inside && v <= c.rhs;
        if (c.sense == pss::lp::Sense::kGreaterEqual) inside = inside && v >= c.rhs;
        if (c.sense == pss::lp::Sense::kEqual) inside = inside && std::abs(v - c.rhs) <= 1e-12;
      }
      EXPECT_EQ(inside, s.contains(x, 0.0)) << s.kind();
    }
  }
}

TEST(ConvexSet, DistanceIsZeroExactlyOnMembers) {
  const auto h = ConvexSet::halfspace(pt({0.0, 1.0}), 1.0);
  EXPECT_EQ(h.distance(pt({5.0, 1.0})), 0.0);
  EXPECT_DOUBLE_EQ(h.distance(pt({5.0, 3.0})), 2.0);
}

}  // namespace
