#include <gtest/gtest.h>

#include <cmath>

#include "fastalm/error.hpp"
#include "fastalm/schedule.hpp"

namespace fastalm {
namespace {

TEST(ThetaNext, FromOneIsGoldenRatioConjugate) {
  const double t = theta_next(1.0);
  EXPECT_NEAR(t, (std::sqrt(5.0) - 1.0) / 2.0, 1e-15);
  EXPECT_NEAR((1.0 - t) / (t * t), 1.0, 1e-14);
}

TEST(ThetaNext, SecondStep) {
  const double t = theta_next(0.6180340);
  EXPECT_NEAR(t, 0.4558868, 1e-7);
  EXPECT_LT(std::abs((1.0 - t) / (t * t) - 1.0 / (0.6180340 * 0.6180340)), 1e-12 * (1.0 / (t * t)));
}

TEST(ThetaNext, IsStrictlyDecreasing) {
  for (double th : {1.0, 0.9, 0.5, 0.1, 1e-3, 1e-8}) EXPECT_LT(theta_next(th), th);
}

TEST(ThetaNext, RejectsOutOfRange) {
  EXPECT_THROW(theta_next(0.0), ParameterError);
  EXPECT_THROW(theta_next(-0.5), ParameterError);
  EXPECT_THROW(theta_next(1.5), ParameterError);
  EXPECT_THROW(theta_next(std::nan("")), ParameterError);
}

TEST(BetaFastPalm, IsReciprocal) {
  EXPECT_EQ(beta_fast_palm(1.0), 1.0);
  EXPECT_EQ(beta_fast_palm(0.5), 2.0);
  EXPECT_THROW(beta_fast_palm(0.0), ParameterError);
  EXPECT_THROW(beta_fast_palm(-1.0), ParameterError);
}

TEST(ThetaState, StartsAtOne) {
  ThetaState s;
  EXPECT_EQ(s.k, 0);
  EXPECT_EQ(s.theta, 1.0);
  EXPECT_EQ(s.inv_theta_sum, 1.0);
}

TEST(ThetaState, LemmaIdentitiesHoldForManySteps) {
  ThetaState s;
  for (int k = 0; k < 20000; ++k) {
    const double prev = s.theta;
    s.advance();
    const double t = s.theta;
    ASSERT_LE(std::abs((1.0 - t) / (t * t) - 1.0 / (prev * prev)), 1e-12 / (prev * prev)) << k;
    ASSERT_LE(t, 2.0 / (s.k + 2.0)) << k;
    const double gap = 1.0 / t - 1.0 / prev;
    ASSERT_GT(gap, 0.0);
    ASSERT_LT(gap, 1.0);
    ASSERT_LE(std::abs(s.inv_theta_sum - 1.0 / (t * t)), 1e-10 / (t * t)) << k;
    // beta = 1/theta >= (k+2)/2
    ASSERT_GE(beta_fast_palm(t), (s.k + 2.0) / 2.0 * (1.0 - 1e-15));
  }
}

}  // namespace
}  // namespace fastalm
