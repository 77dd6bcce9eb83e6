#include "snoise/kernels.hpp"

#include <algorithm>
#include <memory>
#include <cmath>
#include <sstream>

#include "snoise/error.hpp"
#include "snoise/quadrature.hpp"

namespace snoise {

std::string_view kernel_kind_name(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::JumpToLevel: return "jump_to_level";
    case KernelKind::Exponential: return "exponential";
    case KernelKind::PowerLaw: return "power_law";
    case KernelKind::RandomDecay: return "random_decay";
    case KernelKind::Custom: return "custom";
  }
  return "unknown";
}

NoiseKernel::NoiseKernel(KernelKind kind, KernelFn G, KernelFn g, int mark_dim,
                         std::vector<double> params)
    : kind_(kind),
      G_(std::move(G)),
      g_(std::move(g)),
      mark_dim_(mark_dim),
      params_(std::move(params)) {
  if (mark_dim_ < 1) fail(ErrorCode::InvalidArgument, "mark_dim must be >= 1");
}

NoiseKernel NoiseKernel::jump_to_level() {
  return NoiseKernel(
      KernelKind::JumpToLevel, [](double, Mark x) { return x[0]; },
      [](double, Mark) { return 0.0; }, 1, {});
}

NoiseKernel NoiseKernel::exponential(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    fail(ErrorCode::InvalidArgument, "exponential kernel needs finite a, b");
  }
  return NoiseKernel(
      KernelKind::Exponential,
      [a, b](double t, Mark x) { return a * x[0] * std::exp(-b * t); },
      [a, b](double t, Mark x) { return -b * a * x[0] * std::exp(-b * t); }, 1,
      {a, b});
}

NoiseKernel NoiseKernel::power_law(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    fail(ErrorCode::InvalidArgument, "power-law kernel needs c > 0");
  }
  return NoiseKernel(
      KernelKind::PowerLaw, [c](double t, Mark x) { return x[0] / (1.0 + c * t); },
      [c](double t, Mark x) {
        const double d = 1.0 + c * t;
        return -c * x[0] / (d * d);
      },
      1, {c});
}

NoiseKernel NoiseKernel::random_decay() {
  return NoiseKernel(
      KernelKind::RandomDecay,
      [](double t, Mark x) { return x[0] * std::exp(-x[1] * t); },
      [](double t, Mark x) { return -x[1] * x[0] * std::exp(-x[1] * t); }, 2, {});
}

NoiseKernel NoiseKernel::custom(KernelFn G, KernelFn g, int mark_dim,
                                double probe_horizon, double quad_tol,
                                std::vector<double> breaks) {
  if (!G || !g) fail(ErrorCode::InvalidArgument, "custom kernel needs both G and g");
  std::sort(breaks.begin(), breaks.end());
  NoiseKernel k(KernelKind::Custom, std::move(G), std::move(g), mark_dim, {});
  k.breaks_ = std::move(breaks);

  const auto times = uniform_grid(0.0, probe_horizon, 10);
  std::vector<std::vector<double>> marks;
  for (double v : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
    marks.emplace_back(static_cast<std::size_t>(mark_dim), v);
  }
  const double residual = continuity_residual(k, times, marks, quad_tol);
  if (!(residual <= quad_tol)) {
    std::ostringstream os;
    os << "custom kernel: G and g disagree, residual " << residual << " > "
       << quad_tol;
    fail(ErrorCode::InconsistentKernel, os.str());
  }
  return k;
}

NoiseKernel NoiseKernel::table(std::span<const TablePoint> points) {
  std::vector<double> ts, xs;
  for (const auto& p : points) {
    if (!std::isfinite(p.t) || !std::isfinite(p.x) || !std::isfinite(p.G) || p.t < 0) {
      fail(ErrorCode::InvalidArgument, "kernel table entries must be finite with t >= 0");
    }
    ts.push_back(p.t);
    xs.push_back(p.x);
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(ts);
  uniq(xs);
  if (ts.size() < 2 || xs.size() < 2 || ts.front() != 0.0) {
    fail(ErrorCode::InvalidArgument,
         "kernel table needs >= 2 distinct t (starting at 0) and >= 2 distinct x");
  }
  if (ts.size() * xs.size() != points.size()) {
    fail(ErrorCode::InvalidArgument, "kernel table must be a full (t, x) grid");
  }
  std::vector<double> values(points.size(), std::nan(""));
  for (const auto& p : points) {
    const auto i = std::lower_bound(ts.begin(), ts.end(), p.t) - ts.begin();
    const auto j = std::lower_bound(xs.begin(), xs.end(), p.x) - xs.begin();
    values[static_cast<std::size_t>(i) * xs.size() + static_cast<std::size_t>(j)] = p.G;
  }
  if (std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); })) {
    fail(ErrorCode::InvalidArgument, "kernel table has duplicate (t, x) nodes");
  }

  struct Table {
    std::vector<double> ts, xs, values;

    // Cell index and weight along an axis; x extrapolates linearly.
    static std::pair<std::size_t, double> locate(const std::vector<double>& axis, double v) {
      std::size_t i = static_cast<std::size_t>(
          std::upper_bound(axis.begin(), axis.end(), v) - axis.begin());
      i = std::clamp<std::size_t>(i, 1, axis.size() - 1) - 1;
      return {i, (v - axis[i]) / (axis[i + 1] - axis[i])};
    }
    double at(std::size_t i, std::size_t j) const { return values[i * xs.size() + j]; }
    double along_x(std::size_t i, double x) const {
      const auto [j, w] = locate(xs, x);
      return (1 - w) * at(i, j) + w * at(i, j + 1);
    }
    double G(double t, double x) const {
      if (t >= ts.back()) return along_x(ts.size() - 1, x);
      const auto [i, w] = locate(ts, t);
      return (1 - w) * along_x(i, x) + w * along_x(i + 1, x);
    }
    double g(double t, double x) const {
      if (t >= ts.back()) return 0.0;
      const auto [i, w] = locate(ts, t);
      return (along_x(i + 1, x) - along_x(i, x)) / (ts[i + 1] - ts[i]);
    }
  };
  auto table = std::make_shared<const Table>(Table{ts, xs, std::move(values)});
  NoiseKernel k(
      KernelKind::Custom, [table](double t, Mark x) { return table->G(t, x[0]); },
      [table](double t, Mark x) { return table->g(t, x[0]); }, 1, {});
  k.breaks_ = ts;
  return k;
}

void NoiseKernel::check_mark(Mark x) const {
  if (x.size() != static_cast<std::size_t>(mark_dim_)) {
    fail(ErrorCode::DimensionMismatch, "mark has dimension " + std::to_string(x.size()) +
                                           ", kernel expects " +
                                           std::to_string(mark_dim_));
  }
}

double NoiseKernel::G(double t, Mark x) const {
  if (!(t >= 0.0)) fail(ErrorCode::InvalidArgument, "kernel time must be >= 0");
  check_mark(x);
  const double v = G_(t, x);
  if (!std::isfinite(v)) fail(ErrorCode::NonFinite, "G(t, x) is not finite");
  return v;
}

double NoiseKernel::g(double t, Mark x) const {
  if (!(t >= 0.0)) fail(ErrorCode::InvalidArgument, "kernel time must be >= 0");
  check_mark(x);
  const double v = g_(t, x);
  if (!std::isfinite(v)) fail(ErrorCode::NonFinite, "g(t, x) is not finite");
  return v;
}

std::optional<std::pair<double, double>> NoiseKernel::exponential_params() const {
  if (kind_ != KernelKind::Exponential) return std::nullopt;
  return std::make_pair(params_[0], params_[1]);
}

std::string NoiseKernel::describe() const {
  std::ostringstream os;
  os << kernel_kind_name(kind_);
  if (kind_ == KernelKind::Exponential) os << "(a=" << params_[0] << ", b=" << params_[1] << ")";
  if (kind_ == KernelKind::PowerLaw) os << "(c=" << params_[0] << ")";
  return os.str();
}

double eval_G(const NoiseKernel& kernel, double t, Mark x) { return kernel.G(t, x); }

double continuity_residual(const NoiseKernel& kernel, std::span<const double> times,
                           std::span<const std::vector<double>> marks, double quad_tol) {
  QuadratureOptions opt;
  opt.abs_tol = 0.1 * quad_tol;
  double worst = 0.0;
  for (const auto& x : marks) {
    const double g0 = kernel.G(0.0, x);
    for (double t : times) {
      const double integral = adaptive_simpson_breaks(
          [&](double s) { return kernel.g(s, x); }, 0.0, t, kernel.breaks(), opt);
      worst = std::max(worst, std::abs(kernel.G(t, x) - g0 - integral));
    }
  }
  return worst;
}

namespace {

std::vector<double> probe_mark(int dim, int coord, double value) {
  std::vector<double> x(static_cast<std::size_t>(dim), 1.0);
  x[static_cast<std::size_t>(coord)] = value;
  return x;
}

void require_separable(const NoiseKernel& kernel, std::span<const double> times) {
  constexpr double kProbe[] = {0.5, 1.0, 2.0};
  for (double t : times) {
    const auto base = probe_mark(kernel.mark_dim(), 0, 1.0);
    const double ref = kernel.G(t, base);
    for (int coord = 0; coord < kernel.mark_dim(); ++coord) {
      for (double v : kProbe) {
        const auto x = probe_mark(kernel.mark_dim(), coord, v);
        const double ratio = kernel.G(t, x) / (coord == 0 ? v : 1.0);
        if (std::abs(ratio - ref) >= 1e-9 * std::max(1.0, std::abs(ref))) {
          fail(ErrorCode::NotSeparable,
               "G(t, x)/x_1 depends on the mark (coordinate " +
                   std::to_string(coord + 1) + ", t=" + std::to_string(t) + ")");
        }
      }
    }
  }
}

double profile(const NoiseKernel& kernel, double t) {
  return kernel.G(t, probe_mark(kernel.mark_dim(), 0, 1.0));
}

}  // namespace

double separable_profile(const NoiseKernel& kernel, double t) {
  const double probe_times[] = {t};
  require_separable(kernel, probe_times);
  return profile(kernel, t);
}

MarkovFit is_markov_kernel(const NoiseKernel& kernel, std::span<const double> grid,
                           double tol) {
  if (grid.size() < 3) fail(ErrorCode::InvalidArgument, "Markov test needs >= 3 grid points");
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "Markov test needs tol > 0");

  std::vector<double> probes;
  for (std::size_t k = 0; k < 10; ++k) {
    probes.push_back(grid[k * (grid.size() - 1) / 9]);
  }
  require_separable(kernel, probes);

  const double h0 = profile(kernel, 0.0);
  if (std::abs(h0) < tol) fail(ErrorCode::ZeroAtOrigin, "H(0) vanishes");

  MarkovFit fit;
  const double scale = h0 * h0;
  for (double s : grid) {
    for (double t : grid) {
      if (t > s) continue;
      const double r =
          std::abs(profile(kernel, s - t) * profile(kernel, t) - profile(kernel, s) * h0) / scale;
      fit.max_residual = std::max(fit.max_residual, r);
    }
  }
  fit.markov = fit.max_residual <= tol;
  if (fit.markov) {
    fit.a = h0;
    fit.b = -std::log(profile(kernel, 1.0) / h0);
  }
  return fit;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t points) {
  if (points < 2) return {t0};
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = (i + 1 == points) ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / (points - 1);
  }
  return g;
}

}  // namespace snoise
