#pragma once

#include <cstdint>
#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snoise/kernels.hpp"
#include "snoise/marks.hpp"
#include "snoise/quadrature.hpp"

namespace snoise {

// Deterministic function of time, used for jump intensities and short rates.
class RateCurve {
 public:
  static RateCurve constant(double value);
  // Piecewise-linear through (t, value) knots, flat beyond the end knots.
  static RateCurve table(std::vector<std::pair<double, double>> knots);
  // value(t) = intercept + slope * t.
  static RateCurve linear(double intercept, double slope);
  static RateCurve custom(std::function<double(double)> fn, std::vector<double> breaks = {},
                          std::string name = "custom");

  double operator()(double t) const { return fn_(t); }
  const std::vector<double>& breaks() const noexcept { return breaks_; }
  const std::string& describe() const noexcept { return name_; }
  std::optional<double> constant_value() const noexcept { return constant_; }
  // Exact maximum on [t0, t1] for constant/table/linear curves, a dense probe
  // otherwise.
  double max_on(double t0, double t1) const;
  // Exact minimum for constant/table/linear curves, a dense probe otherwise.
  double min_on(double t0, double t1) const;
  // int_t0^t1 value(s) ds.
  double integral(double t0, double t1, double abs_tol = 1e-10) const;

 private:
  std::function<double(double)> fn_;
  std::vector<double> breaks_;
  std::string name_;
  std::optional<double> constant_;
  bool piecewise_linear_ = false;
};

// Deterministic compensator nu(t, dx) dt = rate(t) F(t, dx) dt.
class CompensatorSpec {
 public:
  CompensatorSpec(RateCurve rate, double rate_bound, MarksPtr marks);

  // Time-homogeneous compensator lambda F(dx) dt.
  static CompensatorSpec standard(double lambda, MarksPtr marks);

  double rate(double t) const { return rate_(t); }
  const RateCurve& rate_curve() const noexcept { return rate_; }
  double rate_bound() const noexcept { return rate_bound_; }
  const MarkDistribution& marks() const noexcept { return *marks_; }
  const MarksPtr& marks_ptr() const noexcept { return marks_; }
  int mark_dim() const noexcept { return marks_->dim(); }
  std::optional<double> constant_rate() const noexcept { return rate_.constant_value(); }
  std::string describe() const;

 private:
  RateCurve rate_;
  double rate_bound_;
  MarksPtr marks_;
};

// Realized marked point process on [0, horizon] with strictly increasing
// event times and R^d marks stored contiguously.
class MppPath {
 public:
  MppPath(int mark_dim, double horizon);

  // Appends an event. A time equal to the previous one is moved up by one ulp;
  // an earlier time or a time outside (0, horizon] is rejected.
  void push_back(double t, Mark x);

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  int mark_dim() const noexcept { return mark_dim_; }
  double horizon() const noexcept { return horizon_; }
  double time(std::size_t i) const { return times_[i]; }
  Mark mark(std::size_t i) const {
    return Mark(marks_.data() + i * static_cast<std::size_t>(mark_dim_),
                static_cast<std::size_t>(mark_dim_));
  }
  std::span<const double> times() const noexcept { return times_; }

  // Number of events with T_i <= t.
  std::size_t count_upto(double t) const;
  // Number of events with T_i < t.
  std::size_t count_before(double t) const;
  // Events with T_i <= t, horizon set to t.
  MppPath restricted(double t) const;
  // Z'_t = sum_{T_i <= t} U_i.
  std::vector<double> cumulative_marks(double t) const;

  bool operator==(const MppPath&) const = default;

 private:
  int mark_dim_;
  double horizon_;
  std::vector<double> times_;
  std::vector<double> marks_;
};

// Exact simulation by thinning a homogeneous rate_bound stream. Throws
// InvalidBound when a probed intensity exceeds the bound and ExplosionGuard
// past event_cap events.
MppPath simulate_mpp(const CompensatorSpec& spec, double horizon, std::uint64_t seed,
                     std::uint64_t path_index = 0, std::size_t event_cap = 1'000'000);

// int_t0^t1 int f(s, x) rate(s) F(s, dx) ds. The outer integral is adaptive
// Simpson split at the rate curve's breakpoints and `extra_breaks`; the inner
// integral follows the mark law's integration mode.
template <class V = double, class F>
V compensator_mass(const CompensatorSpec& spec, double t0, double t1, const F& test_fn,
                   const QuadratureOptions& opt = {},
                   std::span<const double> extra_breaks = {}) {
  if (!(t1 >= t0)) fail(ErrorCode::InvalidArgument, "compensator_mass needs t0 <= t1");
  if (t1 == t0) return V{};
  const double scale = std::max(1.0, spec.rate_bound() * (t1 - t0));
  MarkQuadrature inner;
  inner.abs_tol = 0.1 * opt.abs_tol / scale;
  auto outer = [&](double s) -> V {
    const double lam = spec.rate(s);
    if (lam == 0.0) return V{};
    return lam * expect_marks<V>(spec.marks(), s, [&](Mark x) { return test_fn(s, x); }, inner);
  };
  std::vector<double> breaks(spec.rate_curve().breaks().begin(), spec.rate_curve().breaks().end());
  breaks.insert(breaks.end(), extra_breaks.begin(), extra_breaks.end());
  std::sort(breaks.begin(), breaks.end());
  QuadratureOptions outer_opt = opt;
  outer_opt.abs_tol = 0.9 * opt.abs_tol;
  return adaptive_simpson_breaks<V>(outer, t0, t1, breaks, outer_opt);
}

}  // namespace snoise
