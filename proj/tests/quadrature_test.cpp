#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "snoise/quadrature.hpp"

using namespace snoise;

TEST(AdaptiveSimpson, CubicIsExact) {
  const double v = adaptive_simpson([](double x) { return x * x * x - 2.0 * x + 1.0; }, -1.0, 2.0);
  EXPECT_NEAR(v, 3.75 - 3.0 + 3.0, 1e-13);
}

TEST(AdaptiveSimpson, SmoothTranscendental) {
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::exp(-x); }, 0.0, 10.0), 1.0 - std::exp(-10.0), 1e-9);
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI), 2.0, 1e-9);
}

TEST(AdaptiveSimpson, ComplexIntegrand) {
  const auto v = adaptive_simpson<std::complex<double>>(
      [](double x) { return std::exp(std::complex<double>(0.0, x)); }, 0.0, 1.0);
  const auto exact = (std::exp(std::complex<double>(0.0, 1.0)) - 1.0) / std::complex<double>(0.0, 1.0);
  EXPECT_LT(std::abs(v - exact), 1e-9);
}

TEST(AdaptiveSimpson, EmptyInterval) {
  EXPECT_EQ(adaptive_simpson([](double) { return 1.0; }, 1.0, 1.0), 0.0);
}

TEST(AdaptiveSimpson, NonFiniteFails) {
  EXPECT_THROW(adaptive_simpson([](double x) { return 1.0 / x; }, 0.0, 1.0), Error);
}

TEST(AdaptiveSimpson, JumpWithoutBreakFails) {
  QuadratureOptions opt;
  opt.max_depth = 20;
  EXPECT_THROW(adaptive_simpson([](double x) { return x < 0.3 ? 0.0 : 1.0; }, 0.0, 1.0, opt), Error);
}

TEST(AdaptiveSimpson, RightContinuousJumpAtBreak) {
  // Step up at each break: the value at the break belongs to the right piece.
  const std::vector<double> breaks{0.25, 0.5};
  const double v = adaptive_simpson_breaks(
      [](double x) { return x >= 0.5 ? 2.0 : (x >= 0.25 ? 1.0 : 0.0); }, 0.0, 1.0, breaks);
  EXPECT_NEAR(v, 0.25 + 1.0, 1e-12);
}
