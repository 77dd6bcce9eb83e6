#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "snoise/error.hpp"

namespace snoise {

struct QuadratureOptions {
  double abs_tol = 1e-8;
  int max_depth = 30;
  int initial_panels = 8;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class F, class V>
V simpson_step(const F& f, double a, double b, V fa, V fm, V fb, V whole,
               double tol, int depth, const QuadratureOptions& opt) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const V flm = f(lm);
  const V frm = f(rm);
  const V left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const V right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const V delta = left + right - whole;
  if (magnitude(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  if (depth >= opt.max_depth) {
    fail(ErrorCode::QuadratureFailure,
         "adaptive Simpson exceeded depth " + std::to_string(opt.max_depth) +
             " near t=" + std::to_string(m));
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, opt) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, opt);
}

}  // namespace detail

// Adaptive Simpson with Richardson correction on [a, b]. V is double or
// std::complex<double>; complex integrands are refined jointly on |delta|.
template <class V = double, class F>
V adaptive_simpson(const F& f, double a, double b,
                   const QuadratureOptions& opt = {}) {
  if (!(b > a)) return V{};
  const int panels = opt.initial_panels > 0 ? opt.initial_panels : 1;
  const double h = (b - a) / panels;
  const double tol = opt.abs_tol / panels;
  V total{};
  V fa = f(a);
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h;
    const double hi = (k + 1 == panels) ? b : a + (k + 1) * h;
    const double mid = 0.5 * (lo + hi);
    const V fm = f(mid);
    const V fb = f(hi);
    const V whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    total += detail::simpson_step(f, lo, hi, fa, fm, fb, whole, tol, 0, opt);
    fa = fb;
  }
  if (!std::isfinite(detail::magnitude(total))) {
    fail(ErrorCode::QuadratureFailure, "integral is not finite");
  }
  return total;
}

// Integrates piecewise between sorted breakpoints clipped to [a, b], splitting
// the tolerance evenly. Use this when the integrand has kinks or jumps at
// known locations. Each piece is sampled strictly inside its cut points (a few
// ulps in), so a right-continuous jump at a cut is seen from the correct side;
// the skipped slivers contribute O(eps) to the result.
template <class V = double, class F>
V adaptive_simpson_breaks(const F& f, double a, double b,
                          std::span<const double> breaks,
                          const QuadratureOptions& opt = {}) {
  if (!(b > a)) return V{};
  std::vector<double> cuts{a};
  for (double x : breaks) {
    if (x > cuts.back() && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  QuadratureOptions piece = opt;
  piece.abs_tol = opt.abs_tol / static_cast<double>(cuts.size() - 1);
  V total{};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const double nudge = 8.0 * std::numeric_limits<double>::epsilon() *
                         std::max({1.0, std::abs(lo), std::abs(hi)});
    if (hi - lo <= 4.0 * nudge) {
      total += (hi - lo) * f(0.5 * (lo + hi));
      continue;
    }
    total += adaptive_simpson<V>(f, lo + nudge, hi - nudge, piece);
  }
  return total;
}

}  // namespace snoise
