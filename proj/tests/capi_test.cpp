#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "snoise/snoise.h"

TEST(CApi, KernelLifecycleAndEval) {
  snoise_kernel* k = nullptr;
  ASSERT_EQ(snoise_kernel_exponential(2.0, 0.5, &k), SNOISE_OK);
  const double x = 3.0;
  double G = 0.0, g = 0.0;
  ASSERT_EQ(snoise_kernel_eval(k, 1.0, &x, 1, &G, &g), SNOISE_OK);
  EXPECT_DOUBLE_EQ(G, 6.0 * std::exp(-0.5));
  EXPECT_DOUBLE_EQ(g, -3.0 * std::exp(-0.5));
  EXPECT_EQ(snoise_kernel_eval(k, -1.0, &x, 1, &G, &g), SNOISE_E_INVALID_ARGUMENT);
  EXPECT_NE(std::string(snoise_last_error()), "");
  snoise_kernel_free(k);
}

TEST(CApi, MarkovClassification) {
  snoise_kernel* k = nullptr;
  ASSERT_EQ(snoise_kernel_power_law(1.0, &k), SNOISE_OK);
  double grid[11];
  for (int i = 0; i < 11; ++i) grid[i] = 0.5 * i;
  int markov = -1;
  ASSERT_EQ(snoise_kernel_is_markov(k, grid, 11, 1e-10, &markov, nullptr, nullptr, nullptr), SNOISE_OK);
  EXPECT_EQ(markov, 0);
  snoise_kernel_free(k);
  snoise_kernel* r = nullptr;
  ASSERT_EQ(snoise_kernel_random_decay(&r), SNOISE_OK);
  EXPECT_EQ(snoise_kernel_is_markov(r, grid, 11, 1e-10, &markov, nullptr, nullptr, nullptr), SNOISE_E_NOT_SEPARABLE);
  EXPECT_STREQ(snoise_status_name(SNOISE_E_NOT_SEPARABLE), "NotSeparable");
  snoise_kernel_free(r);
}

TEST(CApi, CompoundPoissonCf) {
  snoise_kernel* k = nullptr;
  snoise_marks* m = nullptr;
  snoise_compensator* c = nullptr;
  snoise_process* p = nullptr;
  snoise_path* path = nullptr;
  ASSERT_EQ(snoise_kernel_jump_to_level(&k), SNOISE_OK);
  ASSERT_EQ(snoise_marks_point_mass(0.7, &m), SNOISE_OK);
  ASSERT_EQ(snoise_compensator_standard(2.0, m, &c), SNOISE_OK);
  snoise_marks_free(m);
  ASSERT_EQ(snoise_process_new(k, c, &p), SNOISE_OK);
  ASSERT_EQ(snoise_path_new(1, 1.0, &path), SNOISE_OK);
  double re = 0.0, im = 0.0;
  ASSERT_EQ(snoise_process_cf(p, path, 0.0, 1.0, 1.5, 1e-8, &re, &im), SNOISE_OK);
  const auto exact = std::exp(2.0 * (std::exp(std::complex<double>(0.0, 1.05)) - 1.0));
  EXPECT_NEAR(re, exact.real(), 1e-8);
  EXPECT_NEAR(im, exact.imag(), 1e-8);
  snoise_path_free(path);
  snoise_process_free(p);
  snoise_compensator_free(c);
  snoise_kernel_free(k);
}

TEST(CApi, PathsSimulateAndPush) {
  snoise_marks* m = nullptr;
  snoise_compensator* c = nullptr;
  ASSERT_EQ(snoise_marks_normal(0.0, 1.0, &m), SNOISE_OK);
  ASSERT_EQ(snoise_compensator_standard(5.0, m, &c), SNOISE_OK);
  snoise_path* a = nullptr;
  ASSERT_EQ(snoise_path_simulate(c, 1.0, 9, 0, &a), SNOISE_OK);
  size_t n = 0;
  ASSERT_EQ(snoise_path_size(a, &n), SNOISE_OK);
  double prev = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double t = 0.0, x = 0.0;
    ASSERT_EQ(snoise_path_event(a, i, &t, &x, 1), SNOISE_OK);
    EXPECT_GT(t, prev);
    prev = t;
  }
  const double x2[2] = {1.0, 2.0};
  EXPECT_EQ(snoise_path_push(a, 0.99999, x2, 2), SNOISE_E_DIMENSION_MISMATCH);
  snoise_path_free(a);
  snoise_compensator_free(c);
  snoise_marks_free(m);
}

TEST(CApi, AffineTransform) {
  double re = 0.0, im = 0.0;
  ASSERT_EQ(snoise_affine_cf(2.0, 0.5, 0.3, 2.0, 1.5, 0.3, 0.4, -0.2, &re, &im), SNOISE_OK);
  const auto exact = std::exp(std::complex<double>(0.0, 0.4 * 2.0 - 0.2 * 1.5));
  EXPECT_NEAR(re, exact.real(), 1e-15);
  EXPECT_NEAR(im, exact.imag(), 1e-15);
  double out[6];
  ASSERT_EQ(snoise_riccati_terminal(2.0, 0.5, 0.7, 0.1, 1.0, 512, out), SNOISE_OK);
  EXPECT_EQ(out[2], 0.0);
  EXPECT_EQ(out[3], 0.7);
  EXPECT_EQ(snoise_affine_cf(-1.0, 0.5, 0.0, 0.0, 1.0, 1.0, 0.1, 0.1, &re, &im), SNOISE_E_INVALID_ARGUMENT);
}

TEST(CApi, RunScenarioExitCodes) {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "snoise_capi_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = dir / "sim.ini";
  std::ofstream(cfg) << "[run]\nscenario = simulate\nseed = 4\nn_paths = 400\n[kernel]\nkind = jump_to_level\n"
                        "[compensator]\nrate = constant 1\nmarks = point_mass 1\n";
  int code = -1;
  EXPECT_EQ(snoise_run_scenario("simulate", cfg.c_str(), (dir / "out").c_str(), 0, nullptr, &code), SNOISE_OK);
  EXPECT_EQ(code, 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "paths.csv"));

  EXPECT_EQ(snoise_run_scenario("markov-test", cfg.c_str(), (dir / "out").c_str(), 0, nullptr, &code),
            SNOISE_E_CONFIG_ERROR);
  EXPECT_EQ(code, 2);
  EXPECT_EQ(snoise_run_scenario(nullptr, (dir / "missing.ini").c_str(), nullptr, 0, nullptr, &code),
            SNOISE_E_CONFIG_ERROR);
  EXPECT_EQ(code, 2);
}
