#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "snoise/shotnoise.hpp"

using namespace snoise;
using cd = std::complex<double>;

namespace {
MppPath path_of(std::vector<std::pair<double, double>> events, double horizon) {
  MppPath p(1, horizon);
  for (const auto& [t, x] : events) p.push_back(t, Mark(&x, 1));
  return p;
}
}  // namespace

TEST(ShotNoise, EvalSumsAgedShots) {
  const auto k = NoiseKernel::exponential(2.0, 0.5);
  const auto p = path_of({{0.5, 1.0}, {1.5, -3.0}}, 3.0);
  EXPECT_DOUBLE_EQ(eval_shotnoise(k, p, 1.0), 2.0 * std::exp(-0.25));
  EXPECT_DOUBLE_EQ(eval_shotnoise(k, p, 2.0), 2.0 * std::exp(-0.75) - 6.0 * std::exp(-0.25));
  EXPECT_DOUBLE_EQ(eval_shotnoise(k, p, 0.25), 0.0);
}

TEST(ShotNoise, DimensionMismatchRejected) {
  EXPECT_THROW(ShotNoiseProcess(NoiseKernel::random_decay(), CompensatorSpec::standard(1.0, point_mass(1.0))), Error);
}

TEST(ConditionalCf, ThetaZeroIsOne) {
  const ShotNoiseProcess proc(NoiseKernel::power_law(1.0), CompensatorSpec::standard(2.0, normal_marks(0.0, 1.0)));
  EXPECT_EQ(conditional_cf(proc, FiltrationState::initial(1), 1.0, 0.0), cd(1.0, 0.0));
}

TEST(ConditionalCf, CompoundPoisson) {
  const ShotNoiseProcess proc(NoiseKernel::jump_to_level(), CompensatorSpec::standard(2.0, point_mass(0.7)));
  for (double theta : {-5.0, -1.3, 0.4, 2.0, 5.0}) {
    const cd exact = std::exp(2.0 * (std::exp(cd(0.0, 0.7 * theta)) - 1.0));
    EXPECT_LT(std::abs(conditional_cf(proc, FiltrationState::initial(1), 1.0, theta) - exact), 1e-8);
  }
}

TEST(ConditionalCf, ExponentialKernelExponentialMarks) {
  // G = x e^{-s}, X ~ Exp(1): int_0^T (1/(1 - i theta e^{-s}) - 1) ds
  //   = log(1 - i theta e^{-T}) - log(1 - i theta).
  const double lambda = 1.5, T = 1.2;
  const ShotNoiseProcess proc(NoiseKernel::exponential(1.0, 1.0), CompensatorSpec::standard(lambda, exponential_marks(1.0)));
  for (double theta : {-2.0, -0.5, 0.7, 1.5}) {
    const cd exact = std::exp(lambda * (std::log(cd(1.0, -theta * std::exp(-T))) - std::log(cd(1.0, -theta))));
    EXPECT_LT(std::abs(conditional_cf(proc, FiltrationState::initial(1), T, theta) - exact), 1e-7);
  }
}

TEST(ConditionalCf, StateFactorUsesHistory) {
  const double lambda = 1.0, t = 0.8, T = 2.0, theta = 1.1;
  const ShotNoiseProcess proc(NoiseKernel::exponential(1.0, 1.0), CompensatorSpec::standard(lambda, exponential_marks(1.0)));
  const auto p = path_of({{0.3, 0.6}, {0.7, 1.4}}, T);
  const auto f = conditional_cf_factors(proc, FiltrationState(p, t), T, theta);
  const double past = 0.6 * std::exp(-(T - 0.3)) + 1.4 * std::exp(-(T - 0.7));
  EXPECT_LT(std::abs(f.from_state - cd(0.0, theta * past)), 1e-14);
  const double tau = T - t;
  const cd integral = lambda * (std::log(cd(1.0, -theta * std::exp(-tau))) - std::log(cd(1.0, -theta)));
  EXPECT_LT(std::abs(f.from_integral - integral), 1e-7);
}

TEST(ConditionalLogMgf, ExponentialKernel) {
  const double lambda = 2.0, T = 1.0, h = 0.4;
  const ShotNoiseProcess proc(NoiseKernel::exponential(1.0, 1.0), CompensatorSpec::standard(lambda, exponential_marks(1.0)));
  const double exact = lambda * (std::log(1.0 - h * std::exp(-T)) - std::log(1.0 - h));
  EXPECT_NEAR(conditional_log_mgf(proc, FiltrationState::initial(1), T, h), exact, 1e-7);
}

TEST(ConditionalMean, ExponentialClosedForm) {
  const double a = 1.5, b = 0.7, lambda = 2.0, t = 1.0, T = 2.5;
  const ShotNoiseProcess proc(NoiseKernel::exponential(a, b), CompensatorSpec::standard(lambda, exponential_marks(2.0)));
  const auto p = path_of({{0.2, 1.0}, {0.9, 0.5}}, T);
  const double exact = a * (1.0 * std::exp(-b * (T - 0.2)) + 0.5 * std::exp(-b * (T - 0.9))) +
                       lambda * a * 0.5 * (1.0 - std::exp(-b * (T - t))) / b;
  EXPECT_NEAR(conditional_mean(proc, FiltrationState(p, t), T), exact, 1e-8);
  const ShotNoiseProcess pl(NoiseKernel::power_law(1.0), CompensatorSpec::standard(1.0, point_mass(1.0)));
  try {
    conditional_mean(pl, FiltrationState::initial(1), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KernelNotExponential);
  }
}

TEST(Decomposition, ReconstructsPath) {
  const auto grid = uniform_grid(0.0, 3.0, 31);
  for (const auto& k : {NoiseKernel::exponential(1.0, 2.0), NoiseKernel::power_law(4.0), NoiseKernel::jump_to_level()}) {
    const ShotNoiseProcess proc(k, CompensatorSpec::standard(3.0, normal_marks(0.5, 1.0)));
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto p = simulate_mpp(proc.spec(), 3.0, 123, i);
      const auto d = semimartingale_decompose(proc, p, grid);
      for (std::size_t j = 0; j < grid.size(); ++j) {
        EXPECT_NEAR(d.drift[j] + d.jump_part[j], eval_shotnoise(k, p, grid[j]), 1e-8);
      }
    }
  }
}

TEST(OuRecursion, MatchesDirectEvaluation) {
  const double a = 0.8, b = 1.3;
  const auto k = NoiseKernel::exponential(a, b);
  const auto spec = CompensatorSpec::standard(4.0, normal_marks(0.0, 2.0));
  const auto grid = uniform_grid(0.0, 2.0, 41);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto p = simulate_mpp(spec, 2.0, 77, i);
    double s = 0.0;
    std::size_t next = 0;
    for (std::size_t j = 1; j < grid.size(); ++j) {
      std::vector<OffsetJump> jumps;
      while (next < p.size() && p.time(next) <= grid[j]) {
        jumps.push_back({p.time(next) - grid[j - 1], p.mark(next)[0]});
        ++next;
      }
      s = ou_recursive_update(b, s, grid[j] - grid[j - 1], jumps, a);
      EXPECT_NEAR(s, eval_shotnoise(k, p, grid[j]), 1e-10);
    }
  }
}

TEST(MarkovCounterexample, PowerLawCfDependsOnHistory) {
  // Same S_t from a young unit shot and an older, larger one.
  const double c = 1.0, t = 2.0, T = 3.0;
  const auto k = NoiseKernel::power_law(c);
  const ShotNoiseProcess proc(k, CompensatorSpec::standard(1.0, exponential_marks(1.0)));
  const double scaled = (1.0 + 1.5 * c) / (1.0 + 0.5 * c);
  const auto young = path_of({{t - 0.5, 1.0}}, T);
  const auto old = path_of({{t - 1.5, scaled}}, T);
  ASSERT_NEAR(eval_shotnoise(k, young, t), eval_shotnoise(k, old, t), 1e-14);
  const auto gap = std::abs(conditional_cf(proc, FiltrationState(young, t), T, 1.0) -
                            conditional_cf(proc, FiltrationState(old, t), T, 1.0));
  EXPECT_GT(gap, 1e-3);

  // The exponential kernel has no such gap.
  const auto e = NoiseKernel::exponential(1.0, 1.0);
  const ShotNoiseProcess eproc(e, proc.spec());
  const auto old_e = path_of({{t - 1.5, std::exp(1.0)}}, T);
  const auto gap_e = std::abs(conditional_cf(eproc, FiltrationState(young, t), T, 1.0) -
                              conditional_cf(eproc, FiltrationState(old_e, t), T, 1.0));
  EXPECT_LT(gap_e, 1e-12);
}

TEST(GSquaredMass, ExponentialClosedForm) {
  // int_0^T lambda E[X^2] a^2 b^2 e^{-2bs} ds with X ~ N(0, 1).
  const double a = 1.0, b = 2.0, lambda = 3.0, T = 1.0;
  const ShotNoiseProcess proc(NoiseKernel::exponential(a, b), CompensatorSpec::standard(lambda, normal_marks(0.0, 1.0)));
  EXPECT_NEAR(proc.g_squared_mass(T), lambda * a * a * b * b * (1.0 - std::exp(-2.0 * b * T)) / (2.0 * b), 1e-7);
}
