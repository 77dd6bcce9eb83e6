#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "snoise/kernels.hpp"
#include "snoise/point_process.hpp"
#include "snoise/stats.hpp"

namespace snoise {

// Nonnegative reweighting Y(t, x) of the compensator. Under the new measure
// the compensator is Y(t, x) nu(t, dx) dt. Only deterministic Y is supported.
struct GirsanovKernel {
  std::function<double(double t, Mark x)> Y;
  bool deterministic = true;
  bool time_homogeneous = true;

  static GirsanovKernel identity();
  static GirsanovKernel constant(double c);
  // Y(t, x) = (lambda'/lambda) eta(x).
  static GirsanovKernel stationary(double lambda, double lambda_prime,
                                   std::function<double(Mark)> eta);
};

// int_0^t int Y(s, u) nu(s, du) ds. Throws IntegrabilityFailure when not
// finite and InvalidArgument when Y is negative at a probed point.
double girsanov_mass(const GirsanovKernel& kernel, const CompensatorSpec& spec, double t,
                     const QuadratureOptions& opt = {});

struct DensityPath {
  std::vector<double> times;        // grid points and event times, sorted
  std::vector<double> log_density;  // -inf where L = 0
  std::vector<double> density;
  std::vector<double> at_grid;      // L at the requested grid, in order
  bool zero_density = false;        // some Y(T_n, U_n) = 0: P' << P but not equivalent
};

// L_t = exp(-int_0^t int (Y - 1) dnu) prod_{T_n <= t} Y(T_n, U_n), in log space.
DensityPath density_process(const GirsanovKernel& kernel, const CompensatorSpec& spec,
                            const MppPath& path, std::span<const double> grid,
                            const QuadratureOptions& opt = {});

// Terminal densities for many paths on one horizon, sharing the compensator
// integral.
class TerminalDensity {
 public:
  TerminalDensity(GirsanovKernel kernel, const CompensatorSpec& spec, double horizon,
                  const QuadratureOptions& opt = {});
  double log_density(const MppPath& path) const;
  double density(const MppPath& path) const { return std::exp(log_density(path)); }
  double compensator() const noexcept { return compensator_; }

 private:
  GirsanovKernel kernel_;
  double horizon_;
  double compensator_;
};

// E_{P'}[f] = E_P[L_T f] by simulating under P.
Estimate reweighted_expectation(const GirsanovKernel& kernel, const CompensatorSpec& spec,
                                const std::function<double(const MppPath&)>& functional,
                                double horizon, std::size_t n_paths, std::uint64_t seed);

// L_t = exp(h X_t) / E[exp(h X_t)] at each grid time; log_mgf(t, h) gives
// log E[exp(h X_t)]. Throws MgfDiverges when it is not finite.
std::vector<double> esscher_density(double h, std::span<const double> times,
                                    std::span<const double> values,
                                    const std::function<double(double t, double h)>& log_mgf);

// X_t = X0 exp(mu t + sigma W_t - sigma^2 t/2 + int_0^t sum_{T_i <= s} g(s - T_i, U_i) ds
//              + sum_{T_i <= t} G(0, U_i)).
struct MarketParams {
  double x0 = 1.0;
  double mu = 0.0;
  double sigma = 0.2;
  RateCurve short_rate = RateCurve::constant(0.0);
  NoiseKernel kernel = NoiseKernel::jump_to_level();
  CompensatorSpec spec = CompensatorSpec::standard(0.0, point_mass(0.0));

  void validate() const;
};

// Target measure with compensator lambda' F'(dx) dt, F' = eta F.
struct MartingaleMeasureSpec {
  double lambda_prime = 1.0;
  std::function<double(Mark)> eta;
  // Closed form of F' when known; needed to simulate under the target measure.
  MarksPtr target_marks;
  // Market price of diffusive risk; empty means "use market_price_of_risk".
  std::function<double(double t, const MppPath& path)> xi;

  // eta = 1: only the jump rate changes.
  static MartingaleMeasureSpec rate_change(const CompensatorSpec& spec, double lambda_prime);
  // eta(x) = exp(h x_1) / E[exp(h U_1)], F' the tilted law.
  static MartingaleMeasureSpec exponential_tilt(const CompensatorSpec& spec, double lambda_prime,
                                                double h);

  GirsanovKernel girsanov(const CompensatorSpec& spec) const;
  CompensatorSpec target_compensator(const CompensatorSpec& spec) const;
};

// int eta dF; must be 1 for F' to be a probability law.
double eta_mass(const MartingaleMeasureSpec& mm, const CompensatorSpec& spec);

// Checks sigma, the eta normalization and int exp(G(0,x)) F'(dx) < infinity.
void validate_measure(const MarketParams& market, const MartingaleMeasureSpec& mm);

// sum_{T_i <= t} g(t - T_i, U_i) (strict: T_i < t).
double jump_drift(const NoiseKernel& kernel, const MppPath& path, double t, bool strict = false);

// Minimal-martingale-measure integrand l_{t-} at state (path before t, X_{t-}).
double mmm_ell(const MarketParams& market, const MppPath& path, double t, double x_left);

// m1 = lambda' int (exp(G(0,x)) - 1) F'(dx).
double jump_compensation(const MarketParams& market, const MartingaleMeasureSpec& mm);

// xi_t = (mu - r(t) + m1 + sum_{T_i <= t} g(t - T_i, U_i)) / sigma.
double market_price_of_risk(const MarketParams& market, const MartingaleMeasureSpec& mm,
                            double t, const MppPath& path);

// r(t) - [mu - sigma xi + sum_{T_i <= t} g(t - T_i, U_i) + int (exp(G(0,x)) - 1) Y(t,x) nu(t,dx)].
// Zero iff the drift condition holds at (t, path).
double drift_residual(const MarketParams& market, const MartingaleMeasureSpec& mm, double t,
                      const MppPath& path, double xi);
// Uses mm.xi, or market_price_of_risk when mm.xi is empty.
double drift_residual(const MarketParams& market, const MartingaleMeasureSpec& mm, double t,
                      const MppPath& path);

inline constexpr int kStockPointsPerUnit = 1024;

// One stock path on a refined grid (base grid, requested times, event times).
// At an event time, log_x_left is the left limit and log_x includes the jump.
struct StockPath {
  std::vector<double> times;
  std::vector<double> log_x;
  std::vector<double> log_x_left;
  std::vector<double> log_discount;  // -int_0^t r(s) ds
};

// Builds log X along `events`. With `mm`, the Brownian motion is drift-shifted
// by -int xi ds (W = W' - int xi ds), with xi integrated cell by cell from the
// information at the left end of each cell.
StockPath stock_path(const MarketParams& market, const MartingaleMeasureSpec* mm,
                     const MppPath& events, std::span<const double> extra_times,
                     RandomStream& brownian, int points_per_unit = kStockPointsPerUnit);

struct StockSimulation {
  std::vector<double> grid;
  std::vector<std::vector<double>> x;           // [path][grid]
  std::vector<std::vector<double>> discounted;  // exp(-int r) X
  std::vector<std::size_t> event_counts;
};

// Under mm (if given) jumps follow lambda' F' and xi shifts the Brownian drift.
StockSimulation simulate_stock(const MarketParams& market, const MartingaleMeasureSpec* mm,
                               double horizon, std::span<const double> grid,
                               std::size_t n_paths, std::uint64_t seed,
                               int points_per_unit = kStockPointsPerUnit,
                               std::size_t event_cap = 1'000'000);

}  // namespace snoise
