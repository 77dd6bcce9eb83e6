#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "snoise/error.hpp"
#include "snoise/kernels.hpp"

using namespace snoise;

namespace {
double G(const NoiseKernel& k, double t, std::vector<double> x) { return k.G(t, Mark(x)); }
double g(const NoiseKernel& k, double t, std::vector<double> x) { return k.g(t, Mark(x)); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}
}  // namespace

TEST(Kernels, BuiltinValues) {
  EXPECT_EQ(G(NoiseKernel::jump_to_level(), 3.0, {0.7}), 0.7);
  EXPECT_EQ(g(NoiseKernel::jump_to_level(), 3.0, {0.7}), 0.0);
  const auto e = NoiseKernel::exponential(2.0, 0.5);
  EXPECT_DOUBLE_EQ(G(e, 1.0, {3.0}), 6.0 * std::exp(-0.5));
  EXPECT_DOUBLE_EQ(g(e, 1.0, {3.0}), -3.0 * std::exp(-0.5));
  const auto p = NoiseKernel::power_law(2.0);
  EXPECT_DOUBLE_EQ(G(p, 1.5, {1.0}), 0.25);
  EXPECT_DOUBLE_EQ(g(p, 1.5, {1.0}), -2.0 / 16.0);
  const auto r = NoiseKernel::random_decay();
  EXPECT_DOUBLE_EQ(G(r, 2.0, {1.5, 0.25}), 1.5 * std::exp(-0.5));
}

TEST(Kernels, CheckedEvaluationRejectsBadInput) {
  const auto e = NoiseKernel::exponential(1.0, 1.0);
  EXPECT_EQ(code_of([&] { G(e, -1.0, {1.0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { G(e, 1.0, {1.0, 2.0}); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] { G(e, 1.0, {NAN}); }), ErrorCode::NonFinite);
}

TEST(Kernels, ContinuityResidualOfBuiltins) {
  const auto times = uniform_grid(0.0, 5.0, 11);
  const std::vector<std::vector<double>> marks{{-1.0}, {0.5}, {2.0}};
  for (const auto& k : {NoiseKernel::jump_to_level(), NoiseKernel::exponential(1.5, 0.7), NoiseKernel::power_law(3.0)}) {
    EXPECT_LE(continuity_residual(k, times, marks), 1e-8) << k.describe();
  }
}

TEST(Kernels, CustomConsistencyIsEnforced) {
  KernelFn G = [](double t, Mark x) { return x[0] * std::cos(t); };
  KernelFn good = [](double t, Mark x) { return -x[0] * std::sin(t); };
  KernelFn bad = [](double t, Mark x) { return -x[0] * std::sin(t) * 1.01; };
  EXPECT_NO_THROW(NoiseKernel::custom(G, good, 1));
  EXPECT_EQ(code_of([&] { NoiseKernel::custom(G, bad, 1); }), ErrorCode::InconsistentKernel);
}

TEST(Kernels, TableInterpolation) {
  // G(t, x) = x (1 - t/2) on t in {0, 1, 2}, x in {0, 1}.
  std::vector<NoiseKernel::TablePoint> pts;
  for (double t : {0.0, 1.0, 2.0}) {
    for (double x : {0.0, 1.0}) pts.push_back({t, x, x * (1.0 - t / 2.0)});
  }
  const auto k = NoiseKernel::table(pts);
  EXPECT_NEAR(G(k, 0.5, {0.5}), 0.5 * 0.75, 1e-15);
  EXPECT_NEAR(G(k, 1.0, {3.0}), 1.5, 1e-15);  // linear beyond the x range
  EXPECT_NEAR(G(k, 7.0, {1.0}), 0.0, 1e-15);  // constant after the last t node
  EXPECT_NEAR(g(k, 0.5, {1.0}), -0.5, 1e-15);
  EXPECT_NEAR(g(k, 5.0, {1.0}), 0.0, 1e-15);
  EXPECT_EQ(k.breaks().size(), 3u);
}

TEST(Kernels, TableRejectsIncompleteGrid) {
  std::vector<NoiseKernel::TablePoint> pts{{0.0, 0.0, 0.0}, {0.0, 1.0, 1.0}, {1.0, 0.0, 0.0}};
  EXPECT_THROW(NoiseKernel::table(pts), Error);
}

TEST(Markov, ExponentialIsMarkovWithExactFit) {
  const auto grid = uniform_grid(0.0, 5.0, 11);
  const auto fit = is_markov_kernel(NoiseKernel::exponential(1.7, 0.35), grid);
  EXPECT_TRUE(fit.markov);
  EXPECT_NEAR(fit.a, 1.7, 1e-12);
  EXPECT_NEAR(fit.b, 0.35, 1e-12);
}

TEST(Markov, PowerLawIsNot) {
  const auto grid = uniform_grid(0.0, 5.0, 11);
  for (double c : {0.1, 1.0, 10.0}) EXPECT_FALSE(is_markov_kernel(NoiseKernel::power_law(c), grid).markov);
}

TEST(Markov, JumpToLevelIsMarkovWithZeroDecay) {
  const auto fit = is_markov_kernel(NoiseKernel::jump_to_level(), uniform_grid(0.0, 5.0, 11));
  EXPECT_TRUE(fit.markov);
  EXPECT_EQ(fit.b, 0.0);
}

TEST(Markov, NonSeparableAndZeroAtOrigin) {
  const auto grid = uniform_grid(0.0, 5.0, 11);
  EXPECT_EQ(code_of([&] { is_markov_kernel(NoiseKernel::random_decay(), grid); }), ErrorCode::NotSeparable);
  const auto zero = NoiseKernel::custom([](double t, Mark x) { return x[0] * t * std::exp(-t); },
                                        [](double t, Mark x) { return x[0] * (1.0 - t) * std::exp(-t); }, 1);
  EXPECT_EQ(code_of([&] { is_markov_kernel(zero, grid); }), ErrorCode::ZeroAtOrigin);
}

TEST(Grid, UniformEndpointsExact) {
  const auto g = uniform_grid(0.0, 2.0, 21);
  ASSERT_EQ(g.size(), 21u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 2.0);
}
