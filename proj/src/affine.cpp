#include "snoise/affine.hpp"

#include <cmath>
#include <sstream>

namespace snoise {

namespace {
constexpr double kOverflowGuard = 700.0;
}

void HawkesParams::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) fail(ErrorCode::InvalidArgument, "kappa must be > 0");
  if (!(theta_bar >= 0.0) || !std::isfinite(theta_bar)) {
    fail(ErrorCode::InvalidArgument, "theta_bar must be >= 0");
  }
  if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) {
    fail(ErrorCode::InvalidArgument, "lambda0 must be >= 0");
  }
}

double HawkesParams::intensity(const MppPath& events, double t) const {
  const double decay = std::exp(-kappa * t);
  double lam = decay * lambda0 + theta_bar * (1.0 - decay);
  const std::size_t n = events.count_upto(t);
  for (std::size_t i = 0; i < n; ++i) lam += std::exp(-kappa * (t - events.time(i)));
  return lam;
}

HawkesPath simulate_hawkes(const HawkesParams& params, double horizon, std::uint64_t seed,
                           std::uint64_t path_index, std::size_t event_cap) {
  params.validate();
  HawkesPath out{MppPath(1, horizon), {}, 0.0};
  RandomStream rng(seed, path_index, StreamTag::Hawkes);
  const double unit = 1.0;
  double t = 0.0;
  double lam = params.lambda0;
  auto drift_to = [&](double s) {
    return params.theta_bar + (lam - params.theta_bar) * std::exp(-params.kappa * (s - t));
  };
  for (;;) {
    const double bound = std::max(lam, params.theta_bar);
    if (bound <= 0.0) break;
    const double candidate = t + rng.exponential(bound);
    if (candidate > horizon) break;
    lam = drift_to(candidate);
    t = candidate;
    if (rng.uniform() * bound <= lam) {
      lam += 1.0;
      out.events.push_back(t, std::span<const double>(&unit, 1));
      out.intensity.push_back(lam);
      if (out.events.size() > event_cap) {
        fail(ErrorCode::ExplosionGuard, "Hawkes event count exceeded cap " + std::to_string(event_cap));
      }
    }
  }
  out.terminal_intensity = drift_to(horizon);
  return out;
}

Complex2 transform_boundary(std::array<double, 2> u) {
  return {std::complex<double>(0.0, u[0]), std::complex<double>(0.0, u[1])};
}

RiccatiSolution riccati_solve(const HawkesParams& params, const Complex2& boundary,
                              double horizon, int steps) {
  params.validate();
  if (steps < 1) fail(ErrorCode::InvalidArgument, "Riccati solve needs steps >= 1");
  if (!(horizon >= 0.0)) fail(ErrorCode::InvalidArgument, "Riccati horizon must be >= 0");
  using C = std::complex<double>;
  const C psi1 = boundary[0];
  const double kappa = params.kappa;
  const double level = kappa * params.theta_bar;
  auto dpsi2 = [&](C y) { return -kappa * y + std::exp(y + psi1) - 1.0; };

  RiccatiSolution sol;
  sol.boundary = boundary;
  sol.grid.reserve(static_cast<std::size_t>(steps) + 1);
  sol.phi.reserve(sol.grid.capacity());
  sol.psi2.reserve(sol.grid.capacity());
  const double h = horizon / steps;
  C phi = 0.0;
  C psi2 = boundary[1];
  sol.grid.push_back(0.0);
  sol.phi.push_back(phi);
  sol.psi2.push_back(psi2);
  for (int k = 0; k < steps; ++k) {
    // phi' depends on psi2 only, so its RK4 stages reuse the psi2 stages.
    const C k1 = dpsi2(psi2);
    const C y2 = psi2 + 0.5 * h * k1;
    const C k2 = dpsi2(y2);
    const C y3 = psi2 + 0.5 * h * k2;
    const C k3 = dpsi2(y3);
    const C y4 = psi2 + h * k3;
    const C k4 = dpsi2(y4);
    phi += h / 6.0 * level * (psi2 + 2.0 * y2 + 2.0 * y3 + y4);
    psi2 += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(std::abs(psi2)) || std::abs(psi2) > kOverflowGuard) {
      std::ostringstream os;
      os << "psi2 blew up at t=" << (k + 1) * h;
      fail(ErrorCode::BlowUp, os.str());
    }
    sol.grid.push_back(k + 1 == steps ? horizon : (k + 1) * h);
    sol.phi.push_back(phi);
    sol.psi2.push_back(psi2);
  }
  sol.psi1.assign(sol.grid.size(), psi1);
  return sol;
}

std::complex<double> affine_cf(const HawkesParams& params, const AffineState& state, double T,
                               std::array<double, 2> u, int steps_per_unit) {
  if (!(T >= state.t)) fail(ErrorCode::InvalidArgument, "affine_cf needs t <= T");
  const Complex2 b = transform_boundary(u);
  const double tau = T - state.t;
  if (tau == 0.0) return std::exp(b[0] * state.n + b[1] * state.lambda);
  const int steps = std::max(100, static_cast<int>(std::ceil(steps_per_unit * tau)));
  const auto sol = riccati_solve(params, b, tau, steps);
  return std::exp(sol.phi.back() + sol.psi1.back() * state.n + sol.psi2.back() * state.lambda);
}

double riccati_convergence_order(const HawkesParams& params, const Complex2& boundary,
                                 double horizon, int base_steps, int levels) {
  if (levels < 2) fail(ErrorCode::InvalidArgument, "need >= 2 refinement levels");
  auto terminal = [&](int steps) {
    const auto s = riccati_solve(params, boundary, horizon, steps);
    return std::array<std::complex<double>, 2>{s.phi.back(), s.psi2.back()};
  };
  const int fine = base_steps << (levels + 1);
  const auto a = terminal(fine / 2);
  const auto b = terminal(fine);
  std::array<std::complex<double>, 2> ref;
  for (int i = 0; i < 2; ++i) ref[static_cast<std::size_t>(i)] = b[i] + (b[i] - a[i]) / 15.0;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < levels; ++k) {
    const int steps = base_steps << k;
    const auto v = terminal(steps);
    const double err = std::abs(v[0] - ref[0]) + std::abs(v[1] - ref[1]);
    const double x = std::log(static_cast<double>(steps));
    const double y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = levels;
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double affine_mean_count(const HawkesParams& params, double T, double step) {
  const AffineState start{0.0, 0.0, params.lambda0};
  const auto plus = affine_cf(params, start, T, {step, 0.0});
  const auto minus = affine_cf(params, start, T, {-step, 0.0});
  // d/du E[exp(i u N)] at 0 is i E[N].
  return ((plus - minus) / (2.0 * step)).imag();
}

}  // namespace snoise
