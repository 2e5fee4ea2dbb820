#include <gtest/gtest.h>

#include "pss/stepsize.hpp"

namespace {

using pss::Point;

Point pt(std::initializer_list<double> v) { return pss::to_point(std::vector<double>(v)); }

TEST(ConstantAlpha, OptimalFormula) {
  EXPECT_DOUBLE_EQ(pss::constant_alpha(1.0, 1.0, 99), 0.1);
  EXPECT_DOUBLE_EQ(pss::constant_alpha(2.0, 4.0, 0), 1.0);
  EXPECT_THROW(pss::constant_alpha(0.0, 1.0, 5), pss::ConfigError);
}

TEST(ExogenousAlpha, NormalizesLargeSubgradientsOnly) {
  const pss::ExogenousStep s{1.0, 1.0};
  EXPECT_DOUBLE_EQ(pss::exogenous_alpha(0, s, pt({0.3, 0.4})), 1.0);
  EXPECT_DOUBLE_EQ(pss::exogenous_alpha(1, s, pt({3.0, 4.0})), 0.5 / 5.0);
  EXPECT_DOUBLE_EQ(pss::exogenous_alpha(3, s, pt({0.0})), 0.25);
}

TEST(ExogenousStep, DefaultScheduleIsSquareSummableButNotSummable) {
  const pss::ExogenousStep s;
  EXPECT_DOUBLE_EQ(s.power, 0.51);
  EXPECT_NEAR(s.beta(99), std::pow(100.0, -0.51), 1e-15);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t k = 0; k < 200000; ++k) {
    sum += s.beta(k);
    sum_sq += s.beta(k) * s.beta(k);
  }
  EXPECT_GT(sum, 600.0);
  EXPECT_LT(sum_sq, 1.0 + 1.0 / 0.02);
}

TEST(PolyakAlpha, StepAndStops) {
  const auto step = pss::polyak_alpha(5.0, 1.0, 1.0, pt({1.0, 1.0}), pt({0.0, 0.0}));
  EXPECT_EQ(step.status, pss::PolyakStatus::kStep);
  EXPECT_DOUBLE_EQ(step.alpha, 4.0 / 2.0);
  const auto with_rho = pss::polyak_alpha(5.0, 1.0, 0.5, pt({3.0, 4.0}), pt({1.0, 0.0}));
  EXPECT_DOUBLE_EQ(with_rho.denominator, 36.0);
  EXPECT_DOUBLE_EQ(with_rho.alpha, 0.5 * 4.0 / 36.0);
  EXPECT_EQ(pss::polyak_alpha(1.0, 1.0, 1.0, pt({1.0}), pt({0.0})).status, pss::PolyakStatus::kTargetReached);
  EXPECT_EQ(pss::polyak_alpha(0.5, 1.0, 1.0, pt({1.0}), pt({0.0})).status, pss::PolyakStatus::kTargetReached);
  EXPECT_EQ(pss::polyak_alpha(2.0, 1.0, 1.0, pt({0.0}), pt({0.0})).status,
            pss::PolyakStatus::kStationaryDenominator);
}

TEST(Validate, RejectsOutOfRangeParameters) {
  EXPECT_THROW(pss::validate(pss::ConstantStep{0.0}), pss::ConfigError);
  EXPECT_THROW(pss::validate(pss::ExogenousStep{1.0, 0.5}), pss::ConfigError);
  EXPECT_THROW(pss::validate(pss::ExogenousStep{1.0, 1.2}), pss::ConfigError);
  pss::PolyakStep p;
  p.gammas = {1.95};
  p.gamma_floor = 0.1;
  EXPECT_THROW(pss::validate(p), pss::ConfigError);
  p.gammas = {1.9};
  EXPECT_NO_THROW(pss::validate(p));
  p.gamma_floor = 0.0;
  EXPECT_THROW(pss::validate(p), pss::ConfigError);
}

TEST(TargetSchedule, DecreasesToItsLimit) {
  const pss::TargetSchedule t{2.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(t.at(0), 3.0);
  EXPECT_DOUBLE_EQ(t.at(3), 2.25);
  EXPECT_FALSE(t.is_constant());
  EXPECT_TRUE(pss::TargetSchedule{}.is_constant());
}

}  // namespace
