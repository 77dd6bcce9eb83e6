#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "snoise/point_process.hpp"

namespace snoise {

// Self-exciting intensity d lambda = kappa (theta_bar - lambda) dt + dN.
struct HawkesParams {
  double kappa = 1.0;
  double theta_bar = 0.0;  // mean-reversion level
  double lambda0 = 0.0;

  void validate() const;
  // Intensity at t from the closed-form shot-noise representation.
  double intensity(const MppPath& events, double t) const;
};

struct HawkesPath {
  MppPath events;                    // unit marks
  std::vector<double> intensity;     // lambda at each event time, jump included
  double terminal_intensity = 0.0;   // lambda at the horizon
};

// Ogata thinning; the bound max(lambda, theta_bar) is refreshed at every
// candidate point.
HawkesPath simulate_hawkes(const HawkesParams& params, double horizon, std::uint64_t seed,
                           std::uint64_t path_index = 0, std::size_t event_cap = 1'000'000);

using Complex2 = std::array<std::complex<double>, 2>;

// Transform argument convention: the real vector u of E[exp(i <u, X_T>)]
// enters the Riccati system as the boundary value psi(0) = i u.
Complex2 transform_boundary(std::array<double, 2> u);

struct RiccatiSolution {
  std::vector<double> grid;
  std::vector<std::complex<double>> phi;
  std::vector<std::complex<double>> psi1;
  std::vector<std::complex<double>> psi2;
  Complex2 boundary;
};

// Classical RK4 with `steps` equal steps on [0, horizon] for
//   phi' = kappa theta_bar psi2, psi1' = 0, psi2' = -kappa psi2 + exp(psi1 + psi2) - 1.
// Throws BlowUp when |psi2| passes the overflow guard.
RiccatiSolution riccati_solve(const HawkesParams& params, const Complex2& boundary,
                              double horizon, int steps);

struct AffineState {
  double t = 0.0;
  double n = 0.0;       // N_t
  double lambda = 0.0;  // lambda_t
};

inline constexpr int kRiccatiStepsPerUnit = 2048;

// E[exp(i (u1 N_T + u2 lambda_T)) | F_t].
std::complex<double> affine_cf(const HawkesParams& params, const AffineState& state, double T,
                               std::array<double, 2> u,
                               int steps_per_unit = kRiccatiStepsPerUnit);

// Observed order of the RK4 scheme: least-squares slope of log error against
// log steps, for steps = base_steps * 2^k, k < levels, against a Richardson
// reference computed from two finer solves.
double riccati_convergence_order(const HawkesParams& params, const Complex2& boundary,
                                 double horizon, int base_steps, int levels);

// E[N_T] from the transform: derivative of affine_cf in u1 at 0 by central
// differences.
double affine_mean_count(const HawkesParams& params, double T, double step = 1e-4);

}  // namespace snoise
