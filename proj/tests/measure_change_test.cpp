#include <gtest/gtest.h>

#include <cmath>

#include "snoise/measure_change.hpp"

using namespace snoise;

namespace {
MppPath path_of(std::vector<std::pair<double, double>> events, double horizon) {
  MppPath p(1, horizon);
  for (const auto& [t, x] : events) p.push_back(t, Mark(&x, 1));
  return p;
}

MarketParams market(double mu, double r) {
  MarketParams m;
  m.x0 = 100.0;
  m.mu = mu;
  m.sigma = 0.25;
  m.short_rate = RateCurve::constant(r);
  m.kernel = NoiseKernel::exponential(0.1, 2.0);
  m.spec = CompensatorSpec::standard(1.0, normal_marks(0.0, 0.5));
  return m;
}
}  // namespace

TEST(Density, IdentityKernelIsOne) {
  const auto spec = CompensatorSpec::standard(2.0, normal_marks(0.0, 1.0));
  const auto p = path_of({{0.2, 0.1}, {0.6, -1.0}}, 1.0);
  const auto grid = uniform_grid(0.0, 1.0, 5);
  const auto d = density_process(GirsanovKernel::identity(), spec, p, grid);
  for (double v : d.at_grid) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Density, ConstantKernelClosedForm) {
  // L_t = exp(-(c - 1) lambda t) c^{N_t}.
  const double c = 1.8, lambda = 2.0;
  const auto spec = CompensatorSpec::standard(lambda, point_mass(1.0));
  const auto p = path_of({{0.2, 1.0}, {0.6, 1.0}, {0.9, 1.0}}, 1.0);
  const auto grid = uniform_grid(0.0, 1.0, 11);
  const auto d = density_process(GirsanovKernel::constant(c), spec, p, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double exact = std::exp(-(c - 1.0) * lambda * grid[k]) * std::pow(c, double(p.count_upto(grid[k])));
    EXPECT_NEAR(d.at_grid[k], exact, 1e-10 * exact);
  }
  const TerminalDensity td(GirsanovKernel::constant(c), spec, 1.0);
  EXPECT_NEAR(td.density(p), d.at_grid.back(), 1e-10);
  EXPECT_NEAR(girsanov_mass(GirsanovKernel::constant(c), spec, 1.0), c * lambda, 1e-9);
}

TEST(Density, ZeroKernelValueFlagged) {
  const auto spec = CompensatorSpec::standard(1.0, discrete_marks({0.0, 1.0}, {0.5, 0.5}));
  GirsanovKernel y;
  y.Y = [](double, Mark x) { return x[0] > 0.5 ? 2.0 : 0.0; };
  const auto p = path_of({{0.5, 0.0}}, 1.0);
  const std::vector<double> grid{0.0, 1.0};
  const auto d = density_process(y, spec, p, grid);
  EXPECT_TRUE(d.zero_density);
  EXPECT_EQ(d.at_grid.back(), 0.0);
}

TEST(Density, ReweightedCountMean) {
  const auto spec = CompensatorSpec::standard(1.0, normal_marks(0.0, 1.0));
  const auto est = reweighted_expectation(
      GirsanovKernel::constant(2.0), spec, [](const MppPath& p) { return double(p.size()); }, 1.0, 40000, 3);
  EXPECT_LE(est.se_ratio(2.0), 3.0);
}

TEST(Esscher, NormalizesToOneInMean) {
  // X_t ~ N(0, t): log E[exp(h X_t)] = h^2 t / 2.
  const std::vector<double> t{0.0, 1.0, 2.0}, x{0.0, 0.5, -1.0};
  const auto l = esscher_density(0.3, t, x, [](double s, double h) { return 0.5 * h * h * s; });
  EXPECT_DOUBLE_EQ(l[0], 1.0);
  EXPECT_NEAR(l[1], std::exp(0.15 - 0.045), 1e-15);
  EXPECT_THROW(esscher_density(0.3, t, x, [](double, double) { return INFINITY; }), Error);
}

TEST(MeasureSpec, TiltIsNormalized) {
  const auto spec = CompensatorSpec::standard(1.0, normal_marks(0.2, 0.5));
  const auto mm = MartingaleMeasureSpec::exponential_tilt(spec, 2.0, 0.8);
  EXPECT_NEAR(eta_mass(mm, spec), 1.0, 1e-9);
  const auto target = mm.target_compensator(spec);
  EXPECT_NEAR(expect_marks<double>(target.marks(), 0.0, [](Mark x) { return x[0]; }), 0.2 + 0.8 * 0.25, 1e-9);
}

TEST(DriftCondition, ResidualVanishesAtMarketPriceOfRisk) {
  const auto m = market(0.12, 0.03);
  const auto mm = MartingaleMeasureSpec::exponential_tilt(m.spec, 1.5, -0.5);
  const auto p = path_of({{0.2, 0.4}, {0.5, -0.3}}, 1.0);
  for (double t : {0.1, 0.2, 0.35, 0.9}) {
    const double xi = market_price_of_risk(m, mm, t, p);
    EXPECT_LE(std::abs(drift_residual(m, mm, t, p, xi)), 1e-10);
    // Shifting xi by d moves the residual by sigma d.
    EXPECT_NEAR(drift_residual(m, mm, t, p, xi + 0.1), m.sigma * 0.1, 1e-10);
  }
}

TEST(DriftCondition, JumpDriftStrictness) {
  const auto k = NoiseKernel::exponential(1.0, 1.0);
  const auto p = path_of({{0.5, 2.0}}, 1.0);
  EXPECT_DOUBLE_EQ(jump_drift(k, p, 0.5), -2.0);
  EXPECT_DOUBLE_EQ(jump_drift(k, p, 0.5, true), 0.0);
}

TEST(MinimalMartingaleMeasure, PointMassClosedForm) {
  auto m = market(0.1, 0.0);
  m.spec = CompensatorSpec::standard(2.0, point_mass(0.3));
  m.kernel = NoiseKernel::jump_to_level();
  const double j = std::expm1(0.3);
  const auto p = path_of({}, 1.0);
  EXPECT_NEAR(mmm_ell(m, p, 0.5, 50.0), (0.1 + 2.0 * j) / (2.0 * j * j * 50.0), 1e-12);
  m.spec = CompensatorSpec::standard(2.0, point_mass(0.0));
  try {
    mmm_ell(m, p, 0.5, 50.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateJumps);
  }
}

TEST(Stock, DiscountedMartingaleUnderMeasure) {
  const auto m = market(0.12, 0.03);
  const auto mm = MartingaleMeasureSpec::exponential_tilt(m.spec, 1.5, -0.5);
  const auto grid = uniform_grid(0.0, 1.0, 5);
  const auto sim = simulate_stock(m, &mm, 1.0, grid, 4000, 17, 128);
  std::vector<double> last(sim.discounted.size());
  for (std::size_t i = 0; i < last.size(); ++i) last[i] = sim.discounted[i].back();
  EXPECT_LE(mean_estimate(last).se_ratio(m.x0), 3.0);
  EXPECT_TRUE(martingale_drift_test(sim.discounted).pass);
}

TEST(Stock, NoJumpsIsGeometricBrownianMotion) {
  auto m = market(0.07, 0.0);
  m.spec = CompensatorSpec::standard(0.0, point_mass(0.0));
  const auto grid = uniform_grid(0.0, 1.0, 3);
  const auto sim = simulate_stock(m, nullptr, 1.0, grid, 20000, 4, 16);
  std::vector<double> last(sim.x.size());
  for (std::size_t i = 0; i < last.size(); ++i) last[i] = sim.x[i].back();
  EXPECT_LE(mean_estimate(last).se_ratio(m.x0 * std::exp(0.07)), 3.0);
}
