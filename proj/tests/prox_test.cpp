#include <gtest/gtest.h>

#include "prox_suite.hpp"
#include "pss/prox.hpp"

namespace {

using pss::Point;

Point pt(std::initializer_list<double> v) { return pss::to_point(std::vector<double>(v)); }

TEST(ProxL1, SoftThresholdsEachCoordinate) {
  const Point p = pss::prox_l1(1.0, 1.0, pt({3.0, -0.5, 1.0}));
  EXPECT_DOUBLE_EQ(p[0], 2.0);
  EXPECT_DOUBLE_EQ(p[1], 0.0);
  EXPECT_DOUBLE_EQ(p[2], 0.0);
}

TEST(ProxL1, ZeroLambdaIsIdentity) {
  const Point z = pt({-2.5, 0.0, 7.25});
  EXPECT_EQ(pss::prox_l1(0.3, 0.0, z), z);
}

TEST(ProxL1, RejectsNegativeLambdaAndNonFinite) {
  EXPECT_THROW(pss::L1Regularizer(-1.0), pss::ConfigError);
  EXPECT_THROW(pss::prox_l1(1.0, 1.0, pt({1.0, std::nan("")})), pss::NonFiniteInput);
}

TEST(ProxIndicator, ProjectsOntoBox) {
  const auto box = pss::ConvexSet::box(pt({0.0, 0.0}), pt({1.0, 1.0}));
  const Point p = pss::prox_indicator(box, pt({2.0, -1.0}));
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_DOUBLE_EQ(p[1], 0.0);
}

TEST(ProxIndicator, AlphaDoesNotMatter) {
  const pss::SetIndicator g(pss::ConvexSet::ball(pt({0.0, 0.0}), 1.0));
  const Point z = pt({3.0, 4.0});
  EXPECT_EQ(g.prox(0.01, z), g.prox(100.0, z));
  EXPECT_NEAR(g.prox(1.0, z)[0], 0.6, 1e-15);
}

TEST(Subdifferential, L1SelectionAndMembership) {
  const Point x = pt({1.5, 0.0, -2.0});
  const Point s = pss::subgrad_l1(x);
  EXPECT_EQ(s, pt({1.0, 0.0, -1.0}));
  const pss::L1Regularizer g(0.5);
  EXPECT_TRUE(g.in_subdifferential(pt({0.5, 0.2, -0.5}), x, 1e-12));
  EXPECT_FALSE(g.in_subdifferential(pt({0.5, 0.6, -0.5}), x, 1e-12));
  EXPECT_FALSE(g.in_subdifferential(pt({0.4, 0.0, -0.5}), x, 1e-12));
}

TEST(Subdifferential, BoundedSelectionRespectsRho) {
  pss::Rng rng(5);
  for (const auto& op : suite::operators()) {
    for (int i = 0; i < 200; ++i) {
      const Point x = op.g.prox(1.0, rng.uniform_point(op.dim, -3.0, 3.0));
      const Point w = op.g.bounded_subgradient(x);
      EXPECT_LE(w.norm(), op.g.rho(op.dim) + 1e-12) << op.name;
      EXPECT_TRUE(op.g.in_subdifferential(w, x, 1e-9)) << op.name;
    }
  }
}

TEST(Subdifferential, IndicatorOffDomainIsEmpty) {
  const pss::SetIndicator g(pss::ConvexSet::box(pt({0.0}), pt({1.0})));
  EXPECT_FALSE(g.in_subdifferential(pt({0.0}), pt({2.0}), 1e-9));
  EXPECT_TRUE(std::isinf(g.value(pt({2.0}))));
}

TEST(ProxProperties, FirmNonexpansiveness) {
  std::uint64_t seed = 100;
  for (const auto& op : suite::operators()) {
    const auto r = suite::firm_nonexpansive(op, 1000, seed++);
    EXPECT_TRUE(r.ok()) << op.name << " failures=" << r.failures << " worst=" << r.worst;
  }
}

TEST(ProxProperties, OptimalityInclusion) {
  std::uint64_t seed = 200;
  for (const auto& op : suite::operators()) {
    const auto r = suite::optimality_inclusion(op, 1000, seed++);
    EXPECT_TRUE(r.ok()) << op.name << " failures=" << r.failures;
  }
}

TEST(ProxProperties, AgreesWithGridSearch) {
  std::uint64_t seed = 300;
  for (const auto& c : suite::grid_cases()) {
    EXPECT_LE(suite::grid_disagreement(c, 25, seed++), 1e-6) << c.name;
  }
}

TEST(Regularizer, WrapsEveryOracle) {
  const pss::Regularizer g = pss::NonnegL1Regularizer(2.0);
  EXPECT_EQ(g.prox(0.5, pt({3.0, 0.5, -1.0})), pt({2.0, 0.0, 0.0}));
  EXPECT_DOUBLE_EQ(g.value(pt({1.0, 2.0})), 6.0);
  EXPECT_TRUE(std::isinf(g.value(pt({-1.0, 2.0}))));
  EXPECT_DOUBLE_EQ(g.rho(4), 4.0);
}

}  // namespace
