#include <gtest/gtest.h>

#include <cmath>

#include "snoise/kernels.hpp"
#include "snoise/marks.hpp"

using namespace snoise;

namespace {
double mean_of(const MarkDistribution& m) {
  return expect_marks<double>(m, 0.0, [](Mark x) { return x[0]; });
}
double second_of(const MarkDistribution& m) {
  return expect_marks<double>(m, 0.0, [](Mark x) { return x[0] * x[0]; });
}
}  // namespace

TEST(Marks, ModesAndMoments) {
  EXPECT_EQ(point_mass(0.7)->mode(), IntegrationMode::Atoms);
  EXPECT_DOUBLE_EQ(mean_of(*point_mass(0.7)), 0.7);

  const auto d = discrete_marks({1.0, 3.0}, {0.25, 0.75});
  EXPECT_DOUBLE_EQ(mean_of(*d), 2.5);

  const auto n = normal_marks(0.3, 0.5);
  EXPECT_EQ(n->mode(), IntegrationMode::Density1D);
  EXPECT_NEAR(mean_of(*n), 0.3, 1e-9);
  EXPECT_NEAR(second_of(*n), 0.25 + 0.09, 1e-9);

  const auto e = exponential_marks(2.0);
  EXPECT_NEAR(mean_of(*e), 0.5, 1e-9);
  EXPECT_NEAR(second_of(*e), 0.5, 1e-9);

  const auto u = uniform_marks(-1.0, 3.0);
  EXPECT_NEAR(mean_of(*u), 1.0, 1e-9);
}

TEST(Marks, DiscreteRejectsBadProbabilities) {
  EXPECT_THROW(discrete_marks({1.0, 2.0}, {0.5, 0.6}), Error);
  EXPECT_THROW(discrete_marks({1.0}, {0.5, 0.5}), Error);
}

TEST(Marks, ProductQuasiRandom) {
  const auto p = product_marks({normal_marks(1.0, 1.0), exponential_marks(1.0)});
  EXPECT_EQ(p->dim(), 2);
  EXPECT_EQ(p->mode(), IntegrationMode::QuasiRandom);
  const double v = expect_marks<double>(*p, 0.0, [](Mark x) { return x[0] * x[1]; });
  // Halton error through the exponential quantile decays slowly in the tail.
  EXPECT_NEAR(v, 1.0, 1e-2);
  const auto atoms = product_marks({point_mass(2.0), discrete_marks({0.0, 1.0}, {0.5, 0.5})});
  EXPECT_EQ(atoms->mode(), IntegrationMode::Atoms);
  EXPECT_DOUBLE_EQ(expect_marks<double>(*atoms, 0.0, [](Mark x) { return x[0] + x[1]; }), 2.5);
}

TEST(Marks, SampleOnlyRefusesQuadrature) {
  const auto s = sample_only_marks(1, [](double, RandomStream& r, std::span<double> out) { out[0] = r.uniform(); });
  try {
    mean_of(*s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedMarks);
  }
}

TEST(Marks, LogMgfClosedForms) {
  EXPECT_NEAR(normal_marks(0.2, 0.5)->log_mgf(0.8), 0.16 + 0.5 * 0.64 * 0.25, 1e-15);
  EXPECT_NEAR(exponential_marks(2.0)->log_mgf(0.5), std::log(2.0 / 1.5), 1e-15);
  EXPECT_NEAR(point_mass(0.7)->log_mgf(2.0), 1.4, 1e-15);
}

TEST(Marks, TiltedLawIsEsscherTransform) {
  // The tilted law must integrate f against exp(h x)/E[exp(h X)] dF.
  const double h = 0.6;
  for (const auto& m : {normal_marks(0.1, 0.7), exponential_marks(1.5), discrete_marks({-1.0, 2.0}, {0.3, 0.7})}) {
    const double norm = std::exp(m->log_mgf(h));
    const double direct = expect_marks<double>(*m, 0.0, [&](Mark x) { return x[0] * std::exp(h * x[0]) / norm; });
    EXPECT_NEAR(mean_of(*m->tilted(h)), direct, 1e-8) << m->describe();
  }
}

TEST(Marks, SamplerMatchesMean) {
  const auto e = exponential_marks(0.5);
  RandomStream r(9, 0, StreamTag::Marks);
  double s = 0.0, x = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    e->sample(0.0, r, std::span<double>(&x, 1));
    s += x;
  }
  EXPECT_NEAR(s / n, 2.0, 3.0 * 2.0 / std::sqrt(n));
}
