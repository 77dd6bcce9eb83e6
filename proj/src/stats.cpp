#include "snoise/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "snoise/error.hpp"
#include "snoise/special.hpp"

namespace snoise {

double Estimate::se_ratio(double target) const {
  const double gap = std::abs(target - mean);
  if (se == 0.0) return gap == 0.0 ? 0.0 : INFINITY;
  return gap / se;
}

Estimate mean_estimate(std::span<const double> values) {
  Estimate e;
  e.n = values.size();
  if (e.n == 0) return e;
  // Two-pass for accuracy.
  e.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(e.n);
  if (e.n < 2) return e;
  double ss = 0.0;
  for (double v : values) ss += (v - e.mean) * (v - e.mean);
  e.se = std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
  return e;
}

double ComplexEstimate::se() const { return std::hypot(se_re, se_im); }

double ComplexEstimate::se_ratio(std::complex<double> target) const {
  const double gap = std::abs(target - mean);
  const double s = se();
  if (s == 0.0) return gap == 0.0 ? 0.0 : INFINITY;
  return gap / s;
}

ComplexEstimate empirical_cf(std::span<const double> values, double theta) {
  std::vector<double> re(values.size()), im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = std::cos(theta * values[i]);
    im[i] = std::sin(theta * values[i]);
  }
  const auto r = mean_estimate(re);
  const auto m = mean_estimate(im);
  return {{r.mean, m.mean}, r.se, m.se, values.size()};
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b,
                     std::span<const double> weights_a) {
  if (a.empty() || b.empty()) fail(ErrorCode::InvalidArgument, "KS test needs non-empty samples");
  if (!weights_a.empty() && weights_a.size() != a.size()) {
    fail(ErrorCode::InvalidArgument, "KS weights must match sample size");
  }
  std::vector<std::pair<double, double>> wa(a.size());
  double total_a = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    wa[i] = {a[i], weights_a.empty() ? 1.0 : weights_a[i]};
    total_a += wa[i].second;
  }
  std::sort(wa.begin(), wa.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sb.begin(), sb.end());

  double fa = 0.0, fb = 0.0, d = 0.0;
  std::size_t i = 0, j = 0;
  const double nb = static_cast<double>(sb.size());
  while (i < wa.size() || j < sb.size()) {
    const double x = std::min(i < wa.size() ? wa[i].first : INFINITY,
                              j < sb.size() ? sb[j] : INFINITY);
    while (i < wa.size() && wa[i].first == x) fa += wa[i++].second / total_a;
    while (j < sb.size() && sb[j] == x) {
      fb += 1.0 / nb;
      ++j;
    }
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

double ks_critical(double n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(n);
}

double ks_critical_two_sample(double n, double m, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) * std::sqrt((n + m) / (n * m));
}

double effective_sample_size(std::span<const double> weights) {
  double s = 0.0, s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

DriftReport martingale_drift_test(const std::vector<std::vector<double>>& paths,
                                  double nominal_z) {
  if (paths.empty() || paths.front().size() < 2) {
    fail(ErrorCode::InvalidArgument, "drift test needs paths with >= 2 grid points");
  }
  const std::size_t points = paths.front().size();
  const std::size_t windows = points - 1;
  DriftReport report;
  const double alpha = 2.0 * (1.0 - normal_cdf(nominal_z));
  report.threshold = normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(windows)));
  std::vector<double> inc(paths.size());
  for (std::size_t k = 0; k < windows; ++k) {
    for (std::size_t p = 0; p < paths.size(); ++p) {
      if (paths[p].size() != points) fail(ErrorCode::InvalidArgument, "ragged path batch");
      inc[p] = paths[p][k + 1] - paths[p][k];
    }
    const auto e = mean_estimate(inc);
    const double z = e.se > 0.0 ? e.mean / e.se : (e.mean == 0.0 ? 0.0 : INFINITY);
    report.z.push_back(z);
    report.max_abs_z = std::max(report.max_abs_z, std::abs(z));
  }
  report.pass = report.max_abs_z <= report.threshold;
  return report;
}

}  // namespace snoise
