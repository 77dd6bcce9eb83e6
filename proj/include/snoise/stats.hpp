#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace snoise {

// Monte Carlo convention: a closed form passes against an estimate when
// |delta| <= 3 standard errors. Reports always carry the ratio |delta|/SE.
inline constexpr double kSeTolerance = 3.0;

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;

  // |target - mean| / se; 0 when both the gap and the SE vanish.
  double se_ratio(double target) const;
};

Estimate mean_estimate(std::span<const double> values);

struct ComplexEstimate {
  std::complex<double> mean;
  double se_re = 0.0;
  double se_im = 0.0;
  std::size_t n = 0;

  double se() const;
  double se_ratio(std::complex<double> target) const;
};

// Mean of exp(i theta v) over the batch with componentwise standard errors.
ComplexEstimate empirical_cf(std::span<const double> values, double theta);

// sup |F_n - F| for a one-sample test against a continuous CDF.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);
// sup |F_a - F_b|; weights (if non-empty) apply to sample a.
double ks_two_sample(std::span<const double> a, std::span<const double> b,
                     std::span<const double> weights_a = {});
// Asymptotic Kolmogorov critical value c(alpha)/sqrt(n).
double ks_critical(double n, double alpha = 0.01);
double ks_critical_two_sample(double n, double m, double alpha = 0.01);
// (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> weights);

struct DriftReport {
  std::vector<double> z;   // per-window mean increment / SE
  double threshold = 0.0;  // Bonferroni-adjusted |z| bound
  double max_abs_z = 0.0;
  bool pass = false;
};

// paths[p][k]: discounted value of path p at grid point k. Window k is the
// increment from grid point k to k+1. The nominal two-sided level is that of a
// 3-sigma test; it is split evenly across windows.
DriftReport martingale_drift_test(const std::vector<std::vector<double>>& paths,
                                  double nominal_z = kSeTolerance);

}  // namespace snoise
