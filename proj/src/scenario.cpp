#include "snoise/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "snoise/affine.hpp"
#include "snoise/csv.hpp"
#include "snoise/measure_change.hpp"
#include "snoise/parallel.hpp"
#include "snoise/shotnoise.hpp"
#include "snoise/stats.hpp"

namespace snoise {

int exit_code_for(ErrorCode code) noexcept {
  return code == ErrorCode::ConfigError ? kExitConfigError : kExitNumericalFailure;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Plain-text report: free-form lines plus named checks. Checks carry the
// measured value and the bound so every verdict can be audited.
class Report {
 public:
  Report(const ExperimentConfig& cfg) {
    out_ << "snoise " << scenario_name(cfg.scenario) << "\n\n";
    out_ << "resolved config\n---------------\n" << cfg.resolved;
  }

  void section(const std::string& title) {
    out_ << title << "\n" << std::string(title.size(), '-') << "\n";
  }
  void line(const std::string& text) { out_ << text << "\n"; }
  void blank() { out_ << "\n"; }

  void check(const std::string& name, bool pass, const std::string& detail) {
    ++checks_;
    if (!pass) ++failed_;
    out_ << "CHECK " << name << ": " << (pass ? "PASS" : "FAIL") << "  " << detail << "\n";
  }
  // |delta|/SE style check against the 3-SE convention.
  void se_check(const std::string& name, double ratio, const std::string& detail = {}) {
    check(name, ratio <= kSeTolerance,
          (detail.empty() ? "" : detail + "  ") + "|delta|/SE = " + num(ratio) + " (bound " +
              num(kSeTolerance) + ")");
  }

  std::size_t checks() const noexcept { return checks_; }
  std::size_t failed() const noexcept { return failed_; }

  std::string finish() {
    out_ << "\nsummary: " << checks_ << " checks, " << failed_ << " failed\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
  std::size_t checks_ = 0;
  std::size_t failed_ = 0;
};

class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const CsvWriter& csv) {
    const auto path = dir_ / name;
    write_file_atomic(path, csv.str());
    files_.push_back(path);
  }
  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::vector<std::filesystem::path> take() { return std::move(files_); }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
};

// Welch-style ratio for two independent estimates.
double two_sample_ratio(const Estimate& a, const Estimate& b) {
  const double se = std::hypot(a.se, b.se);
  const double gap = std::abs(a.mean - b.mean);
  if (se == 0.0) return gap == 0.0 ? 0.0 : INFINITY;
  return gap / se;
}

// Index of the last refined time <= t, so jumps at t are included.
std::size_t index_at(std::span<const double> times, double t) {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  return it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
}

QuadratureOptions quad(const ExperimentConfig& cfg) {
  QuadratureOptions q;
  q.abs_tol = cfg.run.quad_tol;
  return q;
}

void write_events(Artifacts& art, const std::vector<MppPath>& paths, int dim) {
  std::vector<std::string> header{"path_id", "T_i"};
  for (int k = 1; k <= dim; ++k) header.push_back("U_" + std::to_string(k));
  CsvWriter csv(header);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (std::size_t i = 0; i < paths[p].size(); ++i) {
      csv.field(p).field(paths[p].time(i));
      for (double u : paths[p].mark(i)) csv.field(u);
      csv.end_row();
    }
  }
  art.write("events.csv", csv);
}

void run_simulate(const ExperimentConfig& cfg, Report& rep, Artifacts& art) {
  const auto& kernel = *cfg.kernel;
  const auto& spec = *cfg.compensator;
  const ShotNoiseProcess proc(kernel, spec);
  const double T = cfg.run.horizon;
  const auto grid = uniform_grid(0.0, T, cfg.run.grid_points);
  const std::size_t n = cfg.run.n_paths;
  const std::size_t keep = std::min(n, cfg.run.csv_paths);
  const std::size_t G = grid.size();

  std::vector<double> values(n * G);
  std::vector<std::size_t> counts(n);
  std::vector<MppPath> kept(keep, MppPath(spec.mark_dim(), T));
  parallel_for(n, [&](std::size_t i) {
    auto path = simulate_mpp(spec, T, cfg.run.seed, i);
    for (std::size_t k = 0; k < G; ++k) values[i * G + k] = eval_shotnoise(kernel, path, grid[k]);
    counts[i] = path.size();
    if (i < keep) kept[i] = std::move(path);
  });

  CsvWriter paths_csv({"path_id", "t", "S_t"});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < G; ++k) paths_csv.field(i).field(grid[k]).field(values[i * G + k]).end_row();
  }
  art.write("paths.csv", paths_csv);
  write_events(art, kept, spec.mark_dim());

  const auto opt = quad(cfg);
  CsvWriter dec_csv({"path_id", "t", "S_t", "drift_t", "jump_part_t"});
  double worst = 0.0;
  for (std::size_t p = 0; p < keep; ++p) {
    const auto d = semimartingale_decompose(proc, kept[p], grid, opt);
    for (std::size_t k = 0; k < G; ++k) {
      const double s = values[p * G + k];
      worst = std::max(worst, std::abs(d.drift[k] + d.jump_part[k] - s));
      dec_csv.field(p).field(grid[k]).field(s).field(d.drift[k]).field(d.jump_part[k]).end_row();
    }
  }
  art.write("decomposition.csv", dec_csv);

  rep.section("simulation");
  std::vector<double> cnt(counts.begin(), counts.end());
  const auto events = mean_estimate(cnt);
  rep.line("paths: " + std::to_string(n) + ", grid points: " + std::to_string(G));
  rep.line("mean events per path: " + num(events.mean) + " (SE " + num(events.se) + ")");
  rep.line("kernel: " + kernel.describe());
  rep.line("compensator: " + spec.describe());
  rep.blank();

  rep.section("mean of S_t against int int G(t - s, x) nu(ds, dx)");
  CsvWriter mean_csv({"t", "mean_quadrature", "mean_mc", "se", "se_ratio"});
  double terminal_ratio = 0.0;
  for (std::size_t k = 0; k < G; ++k) {
    const double t = grid[k];
    const double exact = compensator_mass(
        spec, 0.0, t, [&](double s, Mark x) { return kernel.G_unchecked(t - s, x); }, opt,
        kernel.breaks());
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = values[i * G + k];
    const auto est = mean_estimate(col);
    const double ratio = est.se_ratio(exact);
    if (k + 1 == G) terminal_ratio = ratio;
    rep.line("t = " + num(t) + ": quadrature " + num(exact) + ", MC " + num(est.mean) + " +- " +
             num(est.se) + ", |delta|/SE = " + num(ratio));
    mean_csv.field(t).field(exact).field(est.mean).field(est.se).field(ratio).end_row();
  }
  art.write("mean.csv", mean_csv);
  rep.se_check("terminal mean", terminal_ratio);
  rep.check("decomposition drift + jump_part = S", worst <= cfg.run.quad_tol,
            "max residual " + num(worst) + " over " + std::to_string(keep) + " paths (bound " +
                num(cfg.run.quad_tol) + ")");
}

void run_cf_compare(const ExperimentConfig& cfg, Report& rep, Artifacts& art) {
  const auto& kernel = *cfg.kernel;
  const auto& spec = *cfg.compensator;
  const ShotNoiseProcess proc(kernel, spec);
  const double T = cfg.run.horizon;
  const std::size_t n = cfg.run.n_paths;
  if (n < 100) fail(ErrorCode::ConfigError, "[run] n_paths must be >= 100 for cf-compare");

  std::vector<double> terminal(n);
  parallel_for(n, [&](std::size_t i) {
    terminal[i] = eval_shotnoise(kernel, simulate_mpp(spec, T, cfg.run.seed, i), T);
  });

  // Closed form for compound Poisson sums with finitely many mark values.
  const bool compound_poisson = kernel.kind() == KernelKind::JumpToLevel &&
                                spec.constant_rate().has_value() &&
                                spec.marks().mode() == IntegrationMode::Atoms && spec.mark_dim() == 1;
  const auto start = FiltrationState::initial(spec.mark_dim());
  const auto opt = quad(cfg);

  rep.section("conditional CF at t = 0 against the empirical CF of S_T");
  CsvWriter cf_csv({"theta", "re", "im", "abs"});
  CsvWriter cmp_csv({"theta", "cf_re", "cf_im", "mc_re", "mc_im", "se_re", "se_im", "abs_delta", "se_ratio"});
  double worst_ratio = 0.0;
  double worst_closed = 0.0;
  for (double theta : cfg.run.theta) {
    const auto cf = conditional_cf(proc, start, T, theta, opt);
    const auto mc = empirical_cf(terminal, theta);
    const double ratio = mc.se_ratio(cf);
    worst_ratio = std::max(worst_ratio, ratio);
    cf_csv.field(theta).field(cf.real()).field(cf.imag()).field(std::abs(cf)).end_row();
    cmp_csv.field(theta).field(cf.real()).field(cf.imag()).field(mc.mean.real()).field(mc.mean.imag());
    cmp_csv.field(mc.se_re).field(mc.se_im).field(std::abs(cf - mc.mean)).field(ratio).end_row();
    std::string line = "theta = " + num(theta) + ": cf " + num(cf.real()) + " + " + num(cf.imag()) +
                       "i, |delta|/SE = " + num(ratio);
    if (compound_poisson) {
      std::complex<double> expo{};
      for (const auto& atom : spec.marks().atoms(0.0)) {
        expo += atom.weight * (std::exp(std::complex<double>(0.0, theta * atom.x[0])) - 1.0);
      }
      const double err = std::abs(cf - std::exp(*spec.constant_rate() * T * expo));
      worst_closed = std::max(worst_closed, err);
      line += ", closed-form error " + num(err);
    }
    rep.line(line);
  }
  art.write("cf.csv", cf_csv);
  art.write("cf_compare.csv", cmp_csv);
  rep.blank();
  rep.se_check("cf vs empirical", worst_ratio,
               "max over " + std::to_string(cfg.run.theta.size()) + " theta values");
  if (compound_poisson) {
    rep.check("compound Poisson closed form", worst_closed <= 1e-8,
              "max abs error " + num(worst_closed) + " (bound 1e-08)");
  }
}

void run_markov_test(const ExperimentConfig& cfg, Report& rep, Artifacts& art) {
  const auto& kernel = *cfg.kernel;
  const auto grid = uniform_grid(0.0, cfg.markov.grid_end, cfg.markov.grid_points);
  const auto fit = is_markov_kernel(kernel, grid, cfg.markov.tol);

  rep.section("multiplicative Cauchy relation on the grid");
  rep.line("kernel: " + kernel.describe());
  rep.line("markov: " + std::string(fit.markov ? "true" : "false"));
  rep.line("max normalized residual: " + num(fit.max_residual) + " (tolerance " + num(cfg.markov.tol) + ")");
  rep.line("fitted a = " + num(fit.a) + ", b = " + num(fit.b));

  CsvWriter csv({"t", "H_t", "fit_t"});
  for (double t : grid) {
    csv.field(t).field(separable_profile(kernel, t)).field(fit.a * std::exp(-fit.b * t)).end_row();
  }
  art.write("profile.csv", csv);

  if (cfg.markov.expect) {
    rep.check("classification", fit.markov == *cfg.markov.expect,
              std::string("markov = ") + (fit.markov ? "true" : "false") + ", expected " +
                  (*cfg.markov.expect ? "true" : "false"));
  }
  if (const auto ab = kernel.exponential_params(); ab && fit.markov) {
    const double err = std::max(std::abs(fit.a - ab->first), std::abs(fit.b - ab->second));
    rep.check("fitted parameters", err <= 1e-9, "max |fit - truth| " + num(err) + " (bound 1e-09)");
  }

  // Two histories with the same S_t and different futures: a single shot of
  // age 0.5 against a rescaled shot of age 1.5. A Markov kernel gives the same
  // conditional CF for both.
  if (cfg.compensator && kernel.mark_dim() == 1) {
    const double t = 2.0, T = 3.0, theta = 1.0;
    const double h_young = separable_profile(kernel, 0.5);
    const double h_old = separable_profile(kernel, 1.5);
    if (h_old != 0.0) {
      MppPath young(1, T), old(1, T);
      const double one = 1.0, scaled = h_young / h_old;
      young.push_back(t - 0.5, Mark(&one, 1));
      old.push_back(t - 1.5, Mark(&scaled, 1));
      const ShotNoiseProcess proc(kernel, *cfg.compensator);
      const auto opt = quad(cfg);
      const auto a = conditional_cf(proc, FiltrationState(young, t), T, theta, opt);
      const auto b = conditional_cf(proc, FiltrationState(old, t), T, theta, opt);
      rep.blank();
      rep.section("state dependence of the conditional CF");
      rep.line("S_t = " + num(eval_shotnoise(kernel, young, t)) + " and " + num(eval_shotnoise(kernel, old, t)) +
               " at t = 2; CF gap at T = 3, theta = 1: " + num(std::abs(a - b)));
    }
  }
}

void run_affine_validate(const ExperimentConfig& cfg, Report& rep, Artifacts& art) {
  const auto& params = *cfg.affine;
  const double T = cfg.run.horizon;
  const std::size_t n = cfg.run.n_paths;
  const std::size_t keep = std::min(n, cfg.run.csv_paths);
  const std::size_t identity_paths = std::min<std::size_t>(n, 1000);
  static constexpr std::array<std::array<double, 2>, 5> kArgs{
      {{0.5, 0.0}, {0.0, 0.5}, {1.0, -0.5}, {-0.3, 0.8}, {2.0, 0.0}}};

  std::vector<double> count(n), terminal(n), identity(identity_paths, 0.0);
  std::vector<HawkesPath> kept(keep, HawkesPath{MppPath(1, T), {}, 0.0});
  parallel_for(n, [&](std::size_t i) {
    auto h = simulate_hawkes(params, T, cfg.run.seed, i);
    count[i] = static_cast<double>(h.events.size());
    terminal[i] = h.terminal_intensity;
    if (i < identity_paths) {
      double worst = std::abs(h.terminal_intensity - params.intensity(h.events, T));
      for (std::size_t k = 0; k < h.events.size(); ++k) {
        worst = std::max(worst, std::abs(h.intensity[k] - params.intensity(h.events, h.events.time(k))));
      }
      identity[i] = worst;
    }
    if (i < keep) kept[i] = std::move(h);
  });

  CsvWriter lam_csv({"path_id", "t", "lambda_sim", "lambda_closed"});
  CsvWriter ev_csv({"path_id", "T_i"});
  for (std::size_t p = 0; p < keep; ++p) {
    const auto& h = kept[p];
    for (std::size_t k = 0; k < h.events.size(); ++k) {
      const double t = h.events.time(k);
      lam_csv.field(p).field(t).field(h.intensity[k]).field(params.intensity(h.events, t)).end_row();
      ev_csv.field(p).field(t).end_row();
    }
    lam_csv.field(p).field(T).field(h.terminal_intensity).field(params.intensity(h.events, T)).end_row();
  }
  art.write("intensity.csv", lam_csv);
  art.write("events.csv", ev_csv);

  rep.section("Riccati system");
  const int steps = std::max(100, static_cast<int>(std::ceil(kRiccatiStepsPerUnit * T)));
  CsvWriter ric_csv({"u1", "u2", "t", "phi_re", "phi_im", "psi1_re", "psi1_im", "psi2_re", "psi2_im"});
  bool psi1_exact = true;
  for (const auto& u : kArgs) {
    const auto sol = riccati_solve(params, transform_boundary(u), T, steps);
    for (std::size_t k = 0; k < sol.grid.size(); ++k) {
      psi1_exact = psi1_exact && sol.psi1[k] == sol.boundary[0];
      ric_csv.field(u[0]).field(u[1]).field(sol.grid[k]).field(sol.phi[k].real()).field(sol.phi[k].imag());
      ric_csv.field(sol.psi1[k].real()).field(sol.psi1[k].imag()).field(sol.psi2[k].real()).field(sol.psi2[k].imag());
      ric_csv.end_row();
    }
  }
  art.write("riccati.csv", ric_csv);
  rep.check("psi1 constant", psi1_exact, "psi1 equals i u1 bit for bit at every RK4 node");
  const double slope = riccati_convergence_order(params, transform_boundary({1.0, 0.5}), T, 8, 4);
  rep.check("RK4 order", slope >= 3.7 && slope <= 4.3,
            "step-halving slope " + num(slope) + " (accepted range [3.7, 4.3])");
  rep.blank();

  rep.section("transform against Hawkes Monte Carlo");
  const AffineState start{0.0, 0.0, params.lambda0};
  double worst_ratio = 0.0;
  CsvWriter cmp_csv({"u1", "u2", "cf_re", "cf_im", "mc_re", "mc_im", "se", "se_ratio"});
  for (const auto& u : kArgs) {
    const auto cf = affine_cf(params, start, T, u);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = u[0] * count[i] + u[1] * terminal[i];
    const auto mc = empirical_cf(v, 1.0);
    const double ratio = mc.se_ratio(cf);
    worst_ratio = std::max(worst_ratio, ratio);
    cmp_csv.field(u[0]).field(u[1]).field(cf.real()).field(cf.imag()).field(mc.mean.real());
    cmp_csv.field(mc.mean.imag()).field(mc.se()).field(ratio).end_row();
    rep.line("u = (" + num(u[0]) + ", " + num(u[1]) + "): transform " + num(cf.real()) + " + " +
             num(cf.imag()) + "i, MC " + num(mc.mean.real()) + " + " + num(mc.mean.imag()) +
             "i, |delta|/SE = " + num(ratio));
  }
  art.write("affine_compare.csv", cmp_csv);
  rep.se_check("affine transform vs MC", worst_ratio, "max over 5 arguments");
  const double mean_n = affine_mean_count(params, T);
  const auto est = mean_estimate(count);
  rep.se_check("mean event count", est.se_ratio(mean_n),
               "transform " + num(mean_n) + ", MC " + num(est.mean) + " +- " + num(est.se));
  const double worst_identity = *std::max_element(identity.begin(), identity.end());
  rep.check("intensity shot-noise identity", worst_identity <= 1e-10,
            "max deviation " + num(worst_identity) + " over " + std::to_string(identity_paths) +
                " paths (bound 1e-10)");
}

// X_t column for measure-check: the stock when a market is configured, else
// the shot noise when a kernel is configured, else the first coordinate of
// the cumulative marks.
std::vector<double> observable(const ExperimentConfig& cfg, const MppPath& path,
                               std::span<const double> grid, std::size_t path_id) {
  std::vector<double> out(grid.size());
  if (cfg.market) {
    RandomStream brownian(cfg.run.seed, path_id, StreamTag::Brownian);
    const auto sp = stock_path(*cfg.market, nullptr, path, grid, brownian);
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = std::exp(sp.log_x[index_at(sp.times, grid[k])]);
  } else if (cfg.kernel) {
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = eval_shotnoise(*cfg.kernel, path, grid[k]);
  } else {
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = path.cumulative_marks(grid[k])[0];
  }
  return out;
}

void run_measure_check(const ExperimentConfig& cfg, Report& rep, Artifacts& art) {
  const auto& spec = *cfg.compensator;
  const auto& mm = *cfg.measure;
  const double T = cfg.run.horizon;
  const std::size_t n = cfg.run.n_paths;
  const std::size_t keep = std::min(n, cfg.run.csv_paths);
  const auto grid = uniform_grid(0.0, T, cfg.run.grid_points);
  const auto opt = quad(cfg);
  if (cfg.market) validate_measure(*cfg.market, mm);

  const auto Y = mm.girsanov(spec);
  const TerminalDensity terminal(Y, spec, T, opt);

  std::vector<double> density(n), count(n), mark_sum(n);
  std::vector<std::vector<double>> marks(n);
  std::vector<MppPath> kept(keep, MppPath(spec.mark_dim(), T));
  parallel_for(n, [&](std::size_t i) {
    auto path = simulate_mpp(spec, T, cfg.run.seed, i);
    density[i] = terminal.density(path);
    count[i] = static_cast<double>(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) marks[i].push_back(path.mark(k)[0]);
    mark_sum[i] = path.empty() ? 0.0 : path.cumulative_marks(T)[0];
    if (i < keep) kept[i] = std::move(path);
  });

  CsvWriter csv({"path_id", "t", "X_t", "L_t"});
  bool zero_density = false;
  for (std::size_t p = 0; p < keep; ++p) {
    const auto dp = density_process(Y, spec, kept[p], grid, opt);
    zero_density = zero_density || dp.zero_density;
    const auto x = observable(cfg, kept[p], grid, p);
    for (std::size_t k = 0; k < grid.size(); ++k) csv.field(p).field(grid[k]).field(x[k]).field(dp.at_grid[k]).end_row();
  }
  art.write("measure.csv", csv);

  rep.section("density process");
  rep.line("int eta dF = " + num(eta_mass(mm, spec)) + ", lambda' = " + num(mm.lambda_prime));
  rep.line("int int (Y - 1) dnu on [0, T] = " + num(terminal.compensator()));
  if (zero_density) rep.line("note: some Y(T_n, U_n) = 0, so P' is absolutely continuous but not equivalent");
  const auto mean_l = mean_estimate(density);
  rep.se_check("E[L_T] = 1", mean_l.se_ratio(1.0), "mean " + num(mean_l.mean) + " +- " + num(mean_l.se));
  rep.line("effective sample size of the weights: " + num(effective_sample_size(density)));
  rep.blank();

  std::optional<CompensatorSpec> target;
  try {
    target = mm.target_compensator(spec);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnsupportedMarks) throw;
    rep.line("law comparison skipped: the target mark law has no closed form");
    return;
  }

  // Direct draws under P' use path indices n .. 2n-1 so they never share
  // random numbers with the P batch.
  std::vector<double> direct_count(n), direct_mark_sum(n);
  std::vector<std::vector<double>> direct_marks(n);
  parallel_for(n, [&](std::size_t i) {
    const auto path = simulate_mpp(*target, T, cfg.run.seed, n + i);
    direct_count[i] = static_cast<double>(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) direct_marks[i].push_back(path.mark(k)[0]);
    direct_mark_sum[i] = path.empty() ? 0.0 : path.cumulative_marks(T)[0];
  });

  rep.section("reweighted P against direct simulation under P'");
  auto weighted = [&](const std::vector<double>& v) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = density[i] * v[i];
    return mean_estimate(w);
  };
  const auto rw_count = weighted(count);
  const auto dir_count = mean_estimate(direct_count);
  rep.se_check("jump count mean", two_sample_ratio(rw_count, dir_count),
               "reweighted " + num(rw_count.mean) + " +- " + num(rw_count.se) + ", direct " +
                   num(dir_count.mean) + " +- " + num(dir_count.se));
  const auto rw_marks = weighted(mark_sum);
  const auto dir_marks = mean_estimate(direct_mark_sum);
  rep.se_check("cumulative mark mean", two_sample_ratio(rw_marks, dir_marks),
               "reweighted " + num(rw_marks.mean) + " +- " + num(rw_marks.se) + ", direct " +
                   num(dir_marks.mean) + " +- " + num(dir_marks.se));

  const double ess = effective_sample_size(density);
  const double ks_n = ks_two_sample(count, direct_count, density);
  const double crit_n = ks_critical_two_sample(ess, static_cast<double>(n));
  rep.check("jump count law (KS 1%)", ks_n <= crit_n, "D = " + num(ks_n) + ", critical " + num(crit_n));

  std::vector<double> all_marks, mark_weights, all_direct;
  for (std::size_t i = 0; i < n; ++i) {
    for (double u : marks[i]) {
      all_marks.push_back(u);
      mark_weights.push_back(density[i]);
    }
    all_direct.insert(all_direct.end(), direct_marks[i].begin(), direct_marks[i].end());
  }
  if (!all_marks.empty() && !all_direct.empty()) {
    const double ks_u = ks_two_sample(all_marks, all_direct, mark_weights);
    const double crit_u = ks_critical_two_sample(effective_sample_size(mark_weights),
                                                 static_cast<double>(all_direct.size()));
    rep.check("mark law (KS 1%)", ks_u <= crit_u, "D = " + num(ks_u) + ", critical " + num(crit_u));
  }
}

void write_stock(Artifacts& art, const std::string& name, const StockSimulation& sim, std::size_t keep) {
  CsvWriter csv({"path_id", "t", "X_t", "discounted_t"});
  for (std::size_t p = 0; p < keep; ++p) {
    for (std::size_t k = 0; k < sim.grid.size(); ++k) {
      csv.field(p).field(sim.grid[k]).field(sim.x[p][k]).field(sim.discounted[p][k]).end_row();
    }
  }
  art.write(name, csv);
}

void run_drift_check(const ExperimentConfig& cfg, Report& rep, Artifacts& art) {
  const auto& market = *cfg.market;
  const auto& mm = *cfg.measure;
  const double T = cfg.run.horizon;
  const std::size_t n = cfg.run.n_paths;
  const std::size_t keep = std::min(n, cfg.run.csv_paths);
  const auto grid = uniform_grid(0.0, T, cfg.run.grid_points);
  validate_measure(market, mm);

  // Drift condition at random states: a P path and a uniform time on [0, T].
  static constexpr std::size_t kStates = 1000;
  std::vector<double> times(kStates), xis(kStates), residuals(kStates), events(kStates);
  parallel_for(kStates, [&](std::size_t j) {
    const auto path = simulate_mpp(market.spec, T, cfg.run.seed, j);
    RandomStream states(cfg.run.seed, j, StreamTag::States);
    const double t = T * states.uniform();
    times[j] = t;
    events[j] = static_cast<double>(path.count_upto(t));
    xis[j] = mm.xi ? mm.xi(t, path) : market_price_of_risk(market, mm, t, path);
    residuals[j] = drift_residual(market, mm, t, path, xis[j]);
  });
  CsvWriter res_csv({"state_id", "t", "n_events", "xi", "residual"});
  double worst = 0.0;
  for (std::size_t j = 0; j < kStates; ++j) {
    worst = std::max(worst, std::abs(residuals[j]));
    res_csv.field(j).field(times[j]).field(events[j]).field(xis[j]).field(residuals[j]).end_row();
  }
  art.write("residuals.csv", res_csv);

  rep.section("drift condition");
  rep.line("m1 = " + num(jump_compensation(market, mm)));
  rep.check("drift residual", worst <= 1e-10,
            "max |residual| " + num(worst) + " over " + std::to_string(kStates) + " states (bound 1e-10)");
  rep.blank();

  rep.section("discounted stock under the martingale measure");
  const auto sim = simulate_stock(market, &mm, T, grid, n, cfg.run.seed);
  write_stock(art, "stock.csv", sim, keep);
  std::vector<double> last(n);
  for (std::size_t p = 0; p < n; ++p) last[p] = sim.discounted[p].back();
  const auto est = mean_estimate(last);
  rep.se_check("discounted terminal mean", est.se_ratio(market.x0),
               "mean " + num(est.mean) + " +- " + num(est.se) + ", X0 " + num(market.x0));
  const auto drift = martingale_drift_test(sim.discounted);
  rep.check("martingale drift test", drift.pass,
            "max |z| " + num(drift.max_abs_z) + ", Bonferroni bound " + num(drift.threshold) + " over " +
                std::to_string(drift.z.size()) + " windows");

  CsvWriter win_csv({"window", "t_start", "t_end", "z", "z_control"});
  std::vector<double> control_z;
  if (cfg.run.negative_control) {
    rep.blank();
    rep.section("negative control under the physical measure");
    const auto control = simulate_stock(market, nullptr, T, grid, n, cfg.run.seed);
    const auto ctrl = martingale_drift_test(control.discounted);
    control_z = ctrl.z;
    rep.check("negative control rejected", !ctrl.pass,
              "max |z| " + num(ctrl.max_abs_z) + ", Bonferroni bound " + num(ctrl.threshold));
  }
  for (std::size_t k = 0; k < drift.z.size(); ++k) {
    win_csv.field(k).field(grid[k]).field(grid[k + 1]).field(drift.z[k]);
    if (control_z.empty()) {
      win_csv.field(std::string_view(""));
    } else {
      win_csv.field(control_z[k]);
    }
    win_csv.end_row();
  }
  art.write("drift_windows.csv", win_csv);
}

}  // namespace

ScenarioOutcome run_scenario(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  Report rep(cfg);
  rep.blank();
  Artifacts art(out_dir);
  switch (cfg.scenario) {
    case ScenarioKind::Simulate: run_simulate(cfg, rep, art); break;
    case ScenarioKind::CfCompare: run_cf_compare(cfg, rep, art); break;
    case ScenarioKind::MarkovTest: run_markov_test(cfg, rep, art); break;
    case ScenarioKind::AffineValidate: run_affine_validate(cfg, rep, art); break;
    case ScenarioKind::MeasureCheck: run_measure_check(cfg, rep, art); break;
    case ScenarioKind::DriftCheck: run_drift_check(cfg, rep, art); break;
  }
  ScenarioOutcome outcome;
  outcome.checks = rep.checks();
  outcome.failed = rep.failed();
  outcome.exit_code = outcome.failed == 0 ? kExitPass : kExitCheckFailed;
  outcome.report = out_dir / "report.txt";
  write_file_atomic(outcome.report, rep.finish());
  outcome.files = art.take();
  return outcome;
}

}  // namespace snoise
