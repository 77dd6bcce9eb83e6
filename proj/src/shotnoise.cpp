#include "snoise/shotnoise.hpp"

#include <cmath>
#include <sstream>

namespace snoise {

ShotNoiseProcess::ShotNoiseProcess(NoiseKernel kernel, CompensatorSpec spec)
    : kernel_(std::move(kernel)), spec_(std::move(spec)) {
  if (kernel_.mark_dim() != spec_.mark_dim()) {
    fail(ErrorCode::DimensionMismatch, "kernel mark_dim " + std::to_string(kernel_.mark_dim()) +
                                           " != compensator mark_dim " +
                                           std::to_string(spec_.mark_dim()));
  }
}

double ShotNoiseProcess::g_squared_mass(double horizon, const QuadratureOptions& opt) const {
  const std::tuple key{horizon, opt.abs_tol, opt.max_depth, opt.initial_panels};
  {
    std::lock_guard lock(g2_cache_->mu);
    if (auto it = g2_cache_->values.find(key); it != g2_cache_->values.end()) return it->second;
  }
  double mass = 0.0;
  try {
    mass = compensator_mass(
        spec_, 0.0, horizon,
        [&](double s, Mark x) {
          const double v = kernel_.g_unchecked(s, x);
          return v * v;
        },
        opt, kernel_.breaks());
  } catch (const Error& e) {
    fail(ErrorCode::IntegrabilityFailure, std::string("g^2 integrability check failed: ") + e.what());
  }
  if (!std::isfinite(mass)) fail(ErrorCode::IntegrabilityFailure, "int g^2 dnu is not finite");
  std::lock_guard lock(g2_cache_->mu);
  g2_cache_->values.emplace(key, mass);
  return mass;
}

FiltrationState::FiltrationState(const MppPath& path, double t)
    : t_(t), observed_(path.restricted(t)) {
  if (!(t >= 0.0)) fail(ErrorCode::InvalidArgument, "state time must be >= 0");
  if (t > path.horizon()) fail(ErrorCode::InvalidArgument, "state time beyond path horizon");
}

FiltrationState FiltrationState::initial(int mark_dim) {
  return FiltrationState(MppPath(mark_dim, 1.0), 0.0);
}

double eval_shotnoise(const NoiseKernel& kernel, const MppPath& path, double t) {
  if (t > path.horizon()) fail(ErrorCode::InvalidArgument, "evaluation time beyond path horizon");
  if (path.mark_dim() != kernel.mark_dim()) {
    fail(ErrorCode::DimensionMismatch, "path and kernel mark dimensions differ");
  }
  const std::size_t n = path.count_upto(t);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += kernel.G(t - path.time(i), path.mark(i));
  return s;
}

double eval_shotnoise(const ShotNoiseProcess& proc, const MppPath& path, double t) {
  return eval_shotnoise(proc.kernel(), path, t);
}

namespace {

void check_window(const FiltrationState& state, double T) {
  if (!(T >= state.t())) fail(ErrorCode::InvalidArgument, "need state.t <= T");
}

// Breakpoints in s of G(T - s, x) coming from kernel kinks at ages.
std::vector<double> age_breaks(const NoiseKernel& kernel, double T) {
  std::vector<double> out;
  for (double age : kernel.breaks()) out.push_back(T - age);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

CfLogFactors conditional_cf_factors(const ShotNoiseProcess& proc, const FiltrationState& state,
                                    double T, double theta, const QuadratureOptions& opt) {
  check_window(state, T);
  const auto& kernel = proc.kernel();
  const auto& path = state.observed();
  CfLogFactors out{};
  double past = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) past += kernel.G(T - path.time(i), path.mark(i));
  out.from_state = std::complex<double>(0.0, theta * past);
  if (theta == 0.0) return out;

  const auto breaks = age_breaks(kernel, T);
  out.from_integral = compensator_mass<std::complex<double>>(
      proc.spec(), state.t(), T,
      [&](double s, Mark x) {
        const double phase = theta * kernel.G_unchecked(T - s, x);
        return std::complex<double>(std::cos(phase) - 1.0, std::sin(phase));
      },
      opt, breaks);
  return out;
}

std::complex<double> conditional_cf(const ShotNoiseProcess& proc, const FiltrationState& state,
                                    double T, double theta, const QuadratureOptions& opt) {
  if (theta == 0.0) {
    check_window(state, T);
    return {1.0, 0.0};
  }
  return conditional_cf_factors(proc, state, T, theta, opt).value();
}

double conditional_log_mgf(const ShotNoiseProcess& proc, const FiltrationState& state, double T,
                           double h, const QuadratureOptions& opt) {
  check_window(state, T);
  const auto& kernel = proc.kernel();
  const auto& path = state.observed();
  double past = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) past += kernel.G(T - path.time(i), path.mark(i));
  if (h == 0.0) return 0.0;
  double future = 0.0;
  try {
    future = compensator_mass(
        proc.spec(), state.t(), T,
        [&](double s, Mark x) { return std::expm1(h * kernel.G_unchecked(T - s, x)); }, opt,
        age_breaks(kernel, T));
  } catch (const Error& e) {
    fail(ErrorCode::MgfDiverges, std::string("moment generating function: ") + e.what());
  }
  const double out = h * past + future;
  if (!std::isfinite(out)) fail(ErrorCode::MgfDiverges, "moment generating function is not finite");
  return out;
}

double conditional_mean(const ShotNoiseProcess& proc, const FiltrationState& state, double T,
                        const QuadratureOptions& opt) {
  const auto ab = proc.kernel().exponential_params();
  if (!ab) {
    fail(ErrorCode::KernelNotExponential,
         "conditional_mean needs an exponential kernel, got " + proc.kernel().describe());
  }
  check_window(state, T);
  const auto [a, b] = *ab;
  const double s_t = eval_shotnoise(proc.kernel(), state.observed(), state.t());
  const double future = compensator_mass(
      proc.spec(), state.t(), T,
      [&](double s, Mark x) { return a * x[0] * std::exp(-b * (T - s)); }, opt);
  return std::exp(-b * (T - state.t())) * s_t + future;
}

Decomposition semimartingale_decompose(const ShotNoiseProcess& proc, const MppPath& path,
                                       std::span<const double> grid,
                                       const QuadratureOptions& opt) {
  const auto& kernel = proc.kernel();
  if (path.mark_dim() != kernel.mark_dim()) {
    fail(ErrorCode::DimensionMismatch, "path and kernel mark dimensions differ");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] < 0.0 || grid[k] > path.horizon() || (k > 0 && grid[k] < grid[k - 1])) {
      fail(ErrorCode::InvalidArgument, "decomposition grid must be sorted inside [0, horizon]");
    }
  }
  if (!grid.empty()) proc.g_squared_mass(grid.back(), opt);

  // Breakpoints: event times and kernel kinks shifted to each event.
  std::vector<double> breaks(path.times().begin(), path.times().end());
  for (std::size_t i = 0; i < path.size(); ++i) {
    for (double age : kernel.breaks()) breaks.push_back(path.time(i) + age);
  }
  std::sort(breaks.begin(), breaks.end());

  Decomposition out;
  out.grid.assign(grid.begin(), grid.end());
  QuadratureOptions piece = opt;
  piece.abs_tol = 0.5 * opt.abs_tol / static_cast<double>(std::max<std::size_t>(grid.size(), 1));
  double drift = 0.0;
  double prev = 0.0;
  for (double t : grid) {
    drift += adaptive_simpson_breaks(
        [&](double u) {
          const std::size_t n = path.count_upto(u);
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += kernel.g(u - path.time(i), path.mark(i));
          return s;
        },
        prev, t, breaks, piece);
    prev = t;
    const std::size_t n = path.count_upto(t);
    double jumps = 0.0;
    for (std::size_t i = 0; i < n; ++i) jumps += kernel.G(0.0, path.mark(i));
    out.drift.push_back(drift);
    out.jump_part.push_back(jumps);
  }
  return out;
}

double ou_recursive_update(double b, double S_t, double dt, std::span<const OffsetJump> jumps,
                           double a) {
  if (!(dt >= 0.0)) fail(ErrorCode::InvalidArgument, "dt must be >= 0");
  double s = std::exp(-b * dt) * S_t;
  for (const auto& j : jumps) {
    if (!(j.offset > 0.0) || j.offset > dt) {
      fail(ErrorCode::InvalidArgument, "jump offsets must lie in (0, dt]");
    }
    s += a * j.mark * std::exp(-b * (dt - j.offset));
  }
  return s;
}

}  // namespace snoise
