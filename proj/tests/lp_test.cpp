#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pss/lp.hpp"
#include "pss/random.hpp"

namespace {

using pss::lp::LinearConstraint;
using pss::lp::LinearProgram;
using pss::lp::Sense;
using pss::lp::Status;

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

TEST(Simplex, TextbookMaximization) {
  LinearProgram p;
  p.objective = vec({-1.0, -1.0});
  p.constraints = {{vec({1.0, 2.0}), Sense::kLessEqual, 4.0}, {vec({3.0, 1.0}), Sense::kLessEqual, 6.0}};
  p.free_variable = {false, false};
  const auto s = pss::lp::solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.objective, -2.8, 1e-12);
  EXPECT_NEAR(s.x[0], 1.6, 1e-12);
  EXPECT_NEAR(s.x[1], 1.2, 1e-12);
}

TEST(Simplex, EqualityAndFreeVariables) {
  // min x - y  s.t. x + y = 1, -2 <= x - y <= 3, both free.
  LinearProgram p;
  p.objective = vec({1.0, -1.0});
  p.constraints = {{vec({1.0, 1.0}), Sense::kEqual, 1.0},
                   {vec({1.0, -1.0}), Sense::kGreaterEqual, -2.0},
                   {vec({1.0, -1.0}), Sense::kLessEqual, 3.0}};
  const auto s = pss::lp::solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.objective, -2.0, 1e-12);
  EXPECT_NEAR(s.x[0], -0.5, 1e-12);
  EXPECT_NEAR(s.x[1], 1.5, 1e-12);
}

TEST(Simplex, DetectsInfeasibility) {
  LinearProgram p;
  p.objective = vec({1.0});
  p.constraints = {{vec({1.0}), Sense::kGreaterEqual, 2.0}, {vec({1.0}), Sense::kLessEqual, 1.0}};
  EXPECT_EQ(pss::lp::solve(p).status, Status::kInfeasible);
}

TEST(Simplex, DetectsUnboundedness) {
  LinearProgram p;
  p.objective = vec({-1.0, 0.0});
  p.constraints = {{vec({0.0, 1.0}), Sense::kLessEqual, 1.0}};
  p.free_variable = {false, false};
  EXPECT_EQ(pss::lp::solve(p).status, Status::kUnbounded);
}

TEST(Simplex, DegenerateRedundantEqualities) {
  LinearProgram p;
  p.objective = vec({1.0, 2.0, 3.0});
  p.constraints = {{vec({1.0, 1.0, 1.0}), Sense::kEqual, 1.0},
                   {vec({2.0, 2.0, 2.0}), Sense::kEqual, 2.0},
                   {vec({1.0, 0.0, 0.0}), Sense::kLessEqual, 0.0}};
  p.free_variable = {false, false, false};
  const auto s = pss::lp::solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.objective, 2.0, 1e-12);
}

TEST(Simplex, AgreesWithVertexEnumerationOnRandomPolygons) {
  pss::Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<oracle::Halfplane> rows{{1, 0, 3}, {-1, 0, 3}, {0, 1, 3}, {0, -1, 3}};
    LinearProgram p;
    p.objective = rng.uniform_point(2, -1.0, 1.0);
    for (const auto& r : rows) p.constraints.push_back({vec({r.a0, r.a1}), Sense::kLessEqual, r.b});
    const int extra = 1 + static_cast<int>(rng.uniform() * 5);
    for (int i = 0; i < extra; ++i) {
      const double a0 = rng.uniform(-1, 1), a1 = rng.uniform(-1, 1), b = rng.uniform(-1, 2);
      rows.push_back({a0, a1, b});
      p.constraints.push_back({vec({a0, a1}), Sense::kLessEqual, b});
    }
    bool feasible = false;
    const double expected = oracle::enumerate_vertices(p.objective[0], p.objective[1], rows, &feasible);
    const auto s = pss::lp::solve(p);
    if (!feasible) {
      EXPECT_EQ(s.status, Status::kInfeasible) << "trial " << trial;
      continue;
    }
    ASSERT_EQ(s.status, Status::kOptimal) << "trial " << trial;
    EXPECT_NEAR(s.objective, expected, 1e-8) << "trial " << trial;
    for (const auto& c : p.constraints) EXPECT_LE(c.coeffs.dot(s.x), c.rhs + 1e-9);
  }
}

}  // namespace
