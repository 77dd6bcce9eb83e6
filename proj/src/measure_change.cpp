#include "snoise/measure_change.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "snoise/parallel.hpp"

namespace snoise {

namespace {

MarkQuadrature tight_marks() {
  MarkQuadrature q;
  q.abs_tol = 1e-13;
  return q;
}

double require_constant_rate(const CompensatorSpec& spec, const char* what) {
  const auto lam = spec.constant_rate();
  if (!lam || !(*lam > 0.0)) {
    fail(ErrorCode::InvalidArgument,
         std::string(what) + " needs a time-homogeneous compensator with rate > 0");
  }
  return *lam;
}

}  // namespace

GirsanovKernel GirsanovKernel::identity() {
  return {[](double, Mark) { return 1.0; }, true, true};
}

GirsanovKernel GirsanovKernel::constant(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) fail(ErrorCode::InvalidArgument, "Y must be finite and >= 0");
  return {[c](double, Mark) { return c; }, true, true};
}

GirsanovKernel GirsanovKernel::stationary(double lambda, double lambda_prime,
                                          std::function<double(Mark)> eta) {
  if (!(lambda > 0.0) || !(lambda_prime > 0.0)) {
    fail(ErrorCode::InvalidArgument, "stationary Girsanov kernel needs lambda, lambda' > 0");
  }
  if (!eta) fail(ErrorCode::InvalidArgument, "stationary Girsanov kernel needs eta");
  const double ratio = lambda_prime / lambda;
  return {[ratio, eta = std::move(eta)](double, Mark x) { return ratio * eta(x); }, true, true};
}

double girsanov_mass(const GirsanovKernel& kernel, const CompensatorSpec& spec, double t,
                     const QuadratureOptions& opt) {
  double mass = 0.0;
  try {
    mass = compensator_mass(
        spec, 0.0, t,
        [&](double s, Mark x) {
          const double y = kernel.Y(s, x);
          if (!(y >= 0.0)) fail(ErrorCode::InvalidArgument, "Girsanov kernel Y is negative");
          return y;
        },
        opt);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw;
    fail(ErrorCode::IntegrabilityFailure, std::string("int Y dnu: ") + e.what());
  }
  if (!std::isfinite(mass)) fail(ErrorCode::IntegrabilityFailure, "int Y dnu is not finite");
  return mass;
}

namespace {

double log_y(const GirsanovKernel& kernel, double t, Mark x) {
  const double y = kernel.Y(t, x);
  if (!(y >= 0.0) || !std::isfinite(y)) {
    fail(ErrorCode::InvalidArgument, "Girsanov kernel Y must be finite and >= 0");
  }
  return y == 0.0 ? -INFINITY : std::log(y);
}

double compensator_excess(const GirsanovKernel& kernel, const CompensatorSpec& spec, double t0,
                          double t1, const QuadratureOptions& opt) {
  return compensator_mass(spec, t0, t1, [&](double s, Mark x) { return kernel.Y(s, x) - 1.0; },
                          opt);
}

}  // namespace

DensityPath density_process(const GirsanovKernel& kernel, const CompensatorSpec& spec,
                            const MppPath& path, std::span<const double> grid,
                            const QuadratureOptions& opt) {
  if (!kernel.deterministic) {
    fail(ErrorCode::InvalidArgument, "only deterministic Girsanov kernels are supported");
  }
  if (grid.empty()) return {};
  const double t_max = *std::max_element(grid.begin(), grid.end());
  if (grid.front() < 0.0 || t_max > path.horizon()) {
    fail(ErrorCode::InvalidArgument, "density grid must lie in [0, horizon]");
  }
  girsanov_mass(kernel, spec, t_max, opt);

  DensityPath out;
  out.times.assign(grid.begin(), grid.end());
  for (std::size_t i = 0; i < path.count_upto(t_max); ++i) out.times.push_back(path.time(i));
  std::sort(out.times.begin(), out.times.end());
  out.times.erase(std::unique(out.times.begin(), out.times.end()), out.times.end());

  QuadratureOptions piece = opt;
  piece.abs_tol = opt.abs_tol / static_cast<double>(out.times.size());
  double compensator = 0.0;
  double log_jumps = 0.0;
  double prev = 0.0;
  std::size_t next_event = 0;
  for (double t : out.times) {
    compensator += compensator_excess(kernel, spec, prev, t, piece);
    prev = t;
    while (next_event < path.size() && path.time(next_event) <= t) {
      log_jumps += log_y(kernel, path.time(next_event), path.mark(next_event));
      ++next_event;
    }
    const double log_l = log_jumps - compensator;
    out.log_density.push_back(log_l);
    out.density.push_back(std::exp(log_l));
  }
  out.zero_density = std::isinf(log_jumps);
  for (double t : grid) {
    const auto k = std::lower_bound(out.times.begin(), out.times.end(), t) - out.times.begin();
    out.at_grid.push_back(out.density[static_cast<std::size_t>(k)]);
  }
  return out;
}

TerminalDensity::TerminalDensity(GirsanovKernel kernel, const CompensatorSpec& spec,
                                 double horizon, const QuadratureOptions& opt)
    : kernel_(std::move(kernel)), horizon_(horizon) {
  if (!kernel_.deterministic) {
    fail(ErrorCode::InvalidArgument, "only deterministic Girsanov kernels are supported");
  }
  girsanov_mass(kernel_, spec, horizon, opt);
  compensator_ = compensator_excess(kernel_, spec, 0.0, horizon, opt);
}

double TerminalDensity::log_density(const MppPath& path) const {
  double s = -compensator_;
  const std::size_t n = path.count_upto(horizon_);
  for (std::size_t i = 0; i < n; ++i) s += log_y(kernel_, path.time(i), path.mark(i));
  return s;
}

Estimate reweighted_expectation(const GirsanovKernel& kernel, const CompensatorSpec& spec,
                                const std::function<double(const MppPath&)>& functional,
                                double horizon, std::size_t n_paths, std::uint64_t seed) {
  const TerminalDensity density(kernel, spec, horizon);
  std::vector<double> values(n_paths);
  parallel_for(n_paths, [&](std::size_t i) {
    const auto path = simulate_mpp(spec, horizon, seed, i);
    values[i] = density.density(path) * functional(path);
  });
  return mean_estimate(values);
}

std::vector<double> esscher_density(double h, std::span<const double> times,
                                    std::span<const double> values,
                                    const std::function<double(double, double)>& log_mgf) {
  if (times.size() != values.size()) {
    fail(ErrorCode::InvalidArgument, "Esscher density needs one value per time");
  }
  std::vector<double> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (h == 0.0) {
      out[k] = 1.0;
      continue;
    }
    const double lm = log_mgf(times[k], h);
    if (!std::isfinite(lm)) fail(ErrorCode::MgfDiverges, "E[exp(h X_t)] is not finite");
    out[k] = std::exp(h * values[k] - lm);
  }
  return out;
}

void MarketParams::validate() const {
  if (!(x0 > 0.0) || !std::isfinite(x0)) fail(ErrorCode::InvalidArgument, "x0 must be > 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorCode::InvalidArgument, "sigma must be > 0");
  if (!std::isfinite(mu)) fail(ErrorCode::InvalidArgument, "mu must be finite");
  if (kernel.mark_dim() != spec.mark_dim()) {
    fail(ErrorCode::DimensionMismatch, "market kernel and compensator mark dimensions differ");
  }
}

MartingaleMeasureSpec MartingaleMeasureSpec::rate_change(const CompensatorSpec& spec,
                                                         double lambda_prime) {
  MartingaleMeasureSpec mm;
  mm.lambda_prime = lambda_prime;
  mm.eta = [](Mark) { return 1.0; };
  mm.target_marks = spec.marks_ptr();
  return mm;
}

MartingaleMeasureSpec MartingaleMeasureSpec::exponential_tilt(const CompensatorSpec& spec,
                                                              double lambda_prime, double h) {
  const double lm = spec.marks().log_mgf(h);
  MartingaleMeasureSpec mm;
  mm.lambda_prime = lambda_prime;
  mm.eta = [h, lm](Mark x) { return std::exp(h * x[0] - lm); };
  mm.target_marks = spec.marks().tilted(h);
  return mm;
}

GirsanovKernel MartingaleMeasureSpec::girsanov(const CompensatorSpec& spec) const {
  const double lam = require_constant_rate(spec, "stationary measure change");
  return GirsanovKernel::stationary(lam, lambda_prime, eta);
}

CompensatorSpec MartingaleMeasureSpec::target_compensator(const CompensatorSpec& spec) const {
  if (!target_marks) {
    fail(ErrorCode::UnsupportedMarks,
         "simulating under the target measure needs a closed-form F'");
  }
  (void)spec;
  return CompensatorSpec::standard(lambda_prime, target_marks);
}

double eta_mass(const MartingaleMeasureSpec& mm, const CompensatorSpec& spec) {
  if (!mm.eta) fail(ErrorCode::InvalidArgument, "measure spec has no eta");
  return expect_marks<double>(spec.marks(), 0.0, [&](Mark x) { return mm.eta(x); }, tight_marks());
}

void validate_measure(const MarketParams& market, const MartingaleMeasureSpec& mm) {
  market.validate();
  if (!(mm.lambda_prime > 0.0) || !std::isfinite(mm.lambda_prime)) {
    fail(ErrorCode::InvalidArgument, "lambda_prime must be > 0");
  }
  const double mass = eta_mass(mm, market.spec);
  if (std::abs(mass - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "int eta dF = " << mass << ", F' is not a probability law";
    fail(ErrorCode::InvalidArgument, os.str());
  }
  const double moment = expect_marks<double>(
      market.spec.marks(), 0.0,
      [&](Mark x) { return mm.eta(x) * std::exp(market.kernel.G(0.0, x)); }, tight_marks());
  if (!std::isfinite(moment)) fail(ErrorCode::MgfDiverges, "int exp(G(0,x)) F'(dx) diverges");
}

double jump_drift(const NoiseKernel& kernel, const MppPath& path, double t, bool strict) {
  const std::size_t n = strict ? path.count_before(t) : path.count_upto(t);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += kernel.g(t - path.time(i), path.mark(i));
  return s;
}

double mmm_ell(const MarketParams& market, const MppPath& path, double t, double x_left) {
  market.validate();
  if (!(x_left > 0.0)) fail(ErrorCode::InvalidArgument, "X_{t-} must be > 0");
  const double lam = market.spec.rate(t);
  const auto& kernel = market.kernel;
  const double first = lam * expect_marks<double>(
                                 market.spec.marks(), t,
                                 [&](Mark x) { return std::expm1(kernel.G(0.0, x)); },
                                 tight_marks());
  const double second = lam * expect_marks<double>(
                                  market.spec.marks(), t,
                                  [&](Mark x) {
                                    const double j = std::expm1(kernel.G(0.0, x));
                                    return j * j;
                                  },
                                  tight_marks());
  if (!(second > 0.0)) {
    fail(ErrorCode::DegenerateJumps,
         "int (exp(G(0,x)) - 1)^2 nu(t, dx) vanishes: no jump risk to absorb the drift");
  }
  const double numerator = market.mu + jump_drift(kernel, path, t, /*strict=*/true) + first;
  return numerator / second / x_left;
}

double jump_compensation(const MarketParams& market, const MartingaleMeasureSpec& mm) {
  const auto& kernel = market.kernel;
  if (mm.target_marks) {
    return mm.lambda_prime *
           expect_marks<double>(*mm.target_marks, 0.0,
                                [&](Mark x) { return std::expm1(kernel.G(0.0, x)); },
                                tight_marks());
  }
  return mm.lambda_prime *
         expect_marks<double>(market.spec.marks(), 0.0,
                              [&](Mark x) { return mm.eta(x) * std::expm1(kernel.G(0.0, x)); },
                              tight_marks());
}

namespace {

double xi_value(const MarketParams& market, double m1, double t, double g_sum) {
  return (market.mu - market.short_rate(t) + m1 + g_sum) / market.sigma;
}

}  // namespace

double market_price_of_risk(const MarketParams& market, const MartingaleMeasureSpec& mm,
                            double t, const MppPath& path) {
  market.validate();
  require_constant_rate(market.spec, "market_price_of_risk");
  const double m1 = jump_compensation(market, mm);
  if (!std::isfinite(m1)) fail(ErrorCode::MgfDiverges, "m1 is not finite");
  return xi_value(market, m1, t, jump_drift(market.kernel, path, t));
}

double drift_residual(const MarketParams& market, const MartingaleMeasureSpec& mm, double t,
                      const MppPath& path, double xi) {
  market.validate();
  const auto Y = mm.girsanov(market.spec);
  const auto& kernel = market.kernel;
  const double compensated =
      market.spec.rate(t) *
      expect_marks<double>(market.spec.marks(), t,
                           [&](Mark x) { return std::expm1(kernel.G(0.0, x)) * Y.Y(t, x); },
                           tight_marks());
  const double drift =
      market.mu - market.sigma * xi + jump_drift(kernel, path, t) + compensated;
  return market.short_rate(t) - drift;
}

double drift_residual(const MarketParams& market, const MartingaleMeasureSpec& mm, double t,
                      const MppPath& path) {
  const double xi = mm.xi ? mm.xi(t, path) : market_price_of_risk(market, mm, t, path);
  return drift_residual(market, mm, t, path, xi);
}

StockPath stock_path(const MarketParams& market, const MartingaleMeasureSpec* mm,
                     const MppPath& events, std::span<const double> extra_times,
                     RandomStream& brownian, int points_per_unit) {
  const double horizon = events.horizon();
  const auto& kernel = market.kernel;
  std::vector<double> times;
  const auto cells = static_cast<std::size_t>(std::ceil(horizon * points_per_unit));
  for (std::size_t k = 0; k <= cells; ++k) {
    times.push_back(std::min(horizon, static_cast<double>(k) / points_per_unit));
  }
  for (double t : extra_times) {
    if (t < 0.0 || t > horizon) fail(ErrorCode::InvalidArgument, "stock grid outside [0, horizon]");
    times.push_back(t);
  }
  times.insert(times.end(), events.times().begin(), events.times().end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const double m1 = mm ? jump_compensation(market, *mm) : 0.0;
  std::size_t born = 0;  // events with T_i <= left end of the current cell
  auto g_sum = [&](double s) {
    double v = 0.0;
    for (std::size_t i = 0; i < born; ++i) v += kernel.g(s - events.time(i), events.mark(i));
    return v;
  };

  StockPath out;
  out.times = times;
  out.log_x.reserve(times.size());
  out.log_x_left.reserve(times.size());
  out.log_discount.reserve(times.size());
  double log_x = std::log(market.x0);
  double log_disc = 0.0;
  out.log_x.push_back(log_x);
  out.log_x_left.push_back(log_x);
  out.log_discount.push_back(0.0);
  const double sigma = market.sigma;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double a = times[k - 1];
    const double b = times[k];
    const double dt = b - a;
    const double dw = std::sqrt(dt) * brownian.normal();
    const double ga = g_sum(a);
    const double gb = g_sum(b);
    const double ra = market.short_rate(a);
    const double rb = market.short_rate(b);
    log_x += market.mu * dt + sigma * dw - 0.5 * sigma * sigma * dt + 0.5 * dt * (ga + gb);
    if (mm) {
      const double xi_int =
          0.5 * dt * (xi_value(market, m1, a, ga) + xi_value(market, m1, b, gb));
      log_x -= sigma * xi_int;
    }
    log_disc -= 0.5 * dt * (ra + rb);
    out.log_x_left.push_back(log_x);
    while (born < events.size() && events.time(born) <= b) {
      log_x += kernel.G(0.0, events.mark(born));
      ++born;
    }
    out.log_x.push_back(log_x);
    out.log_discount.push_back(log_disc);
  }
  return out;
}

StockSimulation simulate_stock(const MarketParams& market, const MartingaleMeasureSpec* mm,
                               double horizon, std::span<const double> grid,
                               std::size_t n_paths, std::uint64_t seed, int points_per_unit,
                               std::size_t event_cap) {
  market.validate();
  if (mm) validate_measure(market, *mm);
  const CompensatorSpec jumps = mm ? mm->target_compensator(market.spec) : market.spec;

  StockSimulation sim;
  sim.grid.assign(grid.begin(), grid.end());
  sim.x.assign(n_paths, {});
  sim.discounted.assign(n_paths, {});
  sim.event_counts.assign(n_paths, 0);
  parallel_for(n_paths, [&](std::size_t p) {
    const auto events = simulate_mpp(jumps, horizon, seed, p, event_cap);
    RandomStream brownian(seed, p, StreamTag::Brownian);
    const auto sp = stock_path(market, mm, events, grid, brownian, points_per_unit);
    auto& xs = sim.x[p];
    auto& ds = sim.discounted[p];
    for (double t : grid) {
      const auto k = static_cast<std::size_t>(
          std::lower_bound(sp.times.begin(), sp.times.end(), t) - sp.times.begin());
      xs.push_back(std::exp(sp.log_x[k]));
      ds.push_back(std::exp(sp.log_x[k] + sp.log_discount[k]));
    }
    sim.event_counts[p] = events.size();
  });
  return sim;
}

}  // namespace snoise
