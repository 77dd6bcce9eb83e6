#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "snoise/kernels.hpp"
#include "snoise/point_process.hpp"

namespace snoise {

// Shot-noise process S_t = sum_{T_i <= t} G(t - T_i, U_i) driven by a marked
// point process with deterministic compensator.
class ShotNoiseProcess {
 public:
  ShotNoiseProcess(NoiseKernel kernel, CompensatorSpec spec);

  const NoiseKernel& kernel() const noexcept { return kernel_; }
  const CompensatorSpec& spec() const noexcept { return spec_; }

  // int_0^T int g(s, x)^2 nu(ds, dx); throws IntegrabilityFailure when it is
  // not finite. Results are memoized per horizon and quadrature options since the
  // decomposition asks for the same mass once per path.
  double g_squared_mass(double horizon, const QuadratureOptions& opt = {}) const;

 private:
  struct MassCache {
    std::mutex mu;
    std::map<std::tuple<double, double, int, int>, double> values;
  };

  NoiseKernel kernel_;
  CompensatorSpec spec_;
  std::shared_ptr<MassCache> g2_cache_ = std::make_shared<MassCache>();
};

// What is known at time t: the path up to and including t.
class FiltrationState {
 public:
  FiltrationState(const MppPath& path, double t);
  static FiltrationState initial(int mark_dim);

  double t() const noexcept { return t_; }
  const MppPath& observed() const noexcept { return observed_; }

 private:
  double t_;
  MppPath observed_;
};

double eval_shotnoise(const NoiseKernel& kernel, const MppPath& path, double t);
double eval_shotnoise(const ShotNoiseProcess& proc, const MppPath& path, double t);

// Exponential-affine split of the conditional characteristic function:
//   E[exp(i theta S_T) | F_t] = exp(from_state + from_integral)
// with from_state = i theta sum_{T_i <= t} G(T - T_i, U_i) and from_integral =
// int_t^T int (exp(i theta G(T - s, x)) - 1) nu(ds, dx).
struct CfLogFactors {
  std::complex<double> from_state;
  std::complex<double> from_integral;

  std::complex<double> value() const { return std::exp(from_state + from_integral); }
};

CfLogFactors conditional_cf_factors(const ShotNoiseProcess& proc, const FiltrationState& state,
                                    double T, double theta, const QuadratureOptions& opt = {});

std::complex<double> conditional_cf(const ShotNoiseProcess& proc, const FiltrationState& state,
                                    double T, double theta, const QuadratureOptions& opt = {});

// log E[exp(h S_T) | F_t], real exponent counterpart of the CF. Throws
// MgfDiverges when the integral is not finite.
double conditional_log_mgf(const ShotNoiseProcess& proc, const FiltrationState& state, double T,
                           double h, const QuadratureOptions& opt = {});

// E[S_T | F_t] for Exponential(a, b) kernels; KernelNotExponential otherwise.
double conditional_mean(const ShotNoiseProcess& proc, const FiltrationState& state, double T,
                        const QuadratureOptions& opt = {});

struct Decomposition {
  std::vector<double> grid;
  std::vector<double> drift;      // int_0^t sum_{T_i <= u} g(u - T_i, U_i) du
  std::vector<double> jump_part;  // sum_{T_i <= t} G(0, U_i)
};

// Pathwise split S = drift + jump_part on the grid. Checks the g^2
// integrability condition first.
Decomposition semimartingale_decompose(const ShotNoiseProcess& proc, const MppPath& path,
                                       std::span<const double> grid,
                                       const QuadratureOptions& opt = {});

struct OffsetJump {
  double offset;  // time after the previous update, in (0, dt]
  double mark;
};

// One Markov step of the exponential-kernel shot noise:
// exp(-b dt) S_t + sum_j a x_j exp(-b (dt - offset_j)).
double ou_recursive_update(double b, double S_t, double dt, std::span<const OffsetJump> jumps,
                           double a = 1.0);

}  // namespace snoise
