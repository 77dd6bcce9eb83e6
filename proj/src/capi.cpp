#include "snoise/snoise.h"

#include <cstdlib>
#include <string>

#include "snoise/affine.hpp"
#include "snoise/config.hpp"
#include "snoise/scenario.hpp"
#include "snoise/shotnoise.hpp"

using namespace snoise;

struct snoise_kernel {
  NoiseKernel value;
};
struct snoise_marks {
  MarksPtr value;
};
struct snoise_compensator {
  CompensatorSpec value;
};
struct snoise_path {
  MppPath value;
};
struct snoise_process {
  ShotNoiseProcess value;
};

namespace {

thread_local std::string last_error;

snoise_status to_status(ErrorCode code) {
  return static_cast<snoise_status>(static_cast<int>(code) + 1);
}

// Runs body, translating exceptions into status codes.
template <class F>
snoise_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return SNOISE_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return SNOISE_E_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return SNOISE_E_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

template <class Handle, class Make>
snoise_status make(Handle** out, Make&& build) {
  return guarded([&] {
    require(out, "out");
    *out = new Handle{build()};
  });
}

}  // namespace

extern "C" {

const char* snoise_version(void) { return "0.1.0"; }

const char* snoise_status_name(snoise_status status) {
  if (status == SNOISE_OK) return "Ok";
  if (status == SNOISE_E_INTERNAL) return "InternalError";
  const int code = static_cast<int>(status) - 1;
  if (code < 0 || code > static_cast<int>(ErrorCode::IoError)) return "UnknownStatus";
  return error_name(static_cast<ErrorCode>(code)).data();
}

const char* snoise_last_error(void) { return last_error.c_str(); }

snoise_status snoise_kernel_jump_to_level(snoise_kernel** out) {
  return make(out, [] { return NoiseKernel::jump_to_level(); });
}
snoise_status snoise_kernel_exponential(double a, double b, snoise_kernel** out) {
  return make(out, [&] { return NoiseKernel::exponential(a, b); });
}
snoise_status snoise_kernel_power_law(double c, snoise_kernel** out) {
  return make(out, [&] { return NoiseKernel::power_law(c); });
}
snoise_status snoise_kernel_random_decay(snoise_kernel** out) {
  return make(out, [] { return NoiseKernel::random_decay(); });
}
snoise_status snoise_kernel_table(const double* t, const double* x, const double* G, size_t n,
                                  snoise_kernel** out) {
  return make(out, [&] {
    require(t, "t");
    require(x, "x");
    require(G, "G");
    std::vector<NoiseKernel::TablePoint> pts(n);
    for (size_t i = 0; i < n; ++i) pts[i] = {t[i], x[i], G[i]};
    return NoiseKernel::table(pts);
  });
}
void snoise_kernel_free(snoise_kernel* kernel) { delete kernel; }

snoise_status snoise_kernel_mark_dim(const snoise_kernel* kernel, int* dim) {
  return guarded([&] {
    require(kernel, "kernel");
    require(dim, "dim");
    *dim = kernel->value.mark_dim();
  });
}

snoise_status snoise_kernel_eval(const snoise_kernel* kernel, double t, const double* x, size_t dim,
                                 double* G, double* g) {
  return guarded([&] {
    require(kernel, "kernel");
    require(x, "x");
    const Mark mark(x, dim);
    if (G) *G = kernel->value.G(t, mark);
    if (g) *g = kernel->value.g(t, mark);
  });
}

snoise_status snoise_kernel_is_markov(const snoise_kernel* kernel, const double* grid, size_t n,
                                      double tol, int* markov, double* a, double* b,
                                      double* max_residual) {
  return guarded([&] {
    require(kernel, "kernel");
    require(grid, "grid");
    const auto fit = is_markov_kernel(kernel->value, std::span<const double>(grid, n), tol);
    if (markov) *markov = fit.markov ? 1 : 0;
    if (a) *a = fit.a;
    if (b) *b = fit.b;
    if (max_residual) *max_residual = fit.max_residual;
  });
}

snoise_status snoise_marks_point_mass(double u, snoise_marks** out) {
  return make(out, [&] { return point_mass(u); });
}
snoise_status snoise_marks_normal(double mean, double sd, snoise_marks** out) {
  return make(out, [&] { return normal_marks(mean, sd); });
}
snoise_status snoise_marks_exponential(double rate, snoise_marks** out) {
  return make(out, [&] { return exponential_marks(rate); });
}
snoise_status snoise_marks_uniform(double lo, double hi, snoise_marks** out) {
  return make(out, [&] { return uniform_marks(lo, hi); });
}
snoise_status snoise_marks_discrete(const double* values, const double* probs, size_t n,
                                    snoise_marks** out) {
  return make(out, [&] {
    require(values, "values");
    require(probs, "probs");
    return discrete_marks(std::vector<double>(values, values + n), std::vector<double>(probs, probs + n));
  });
}
snoise_status snoise_marks_product(const snoise_marks* const* parts, size_t n, snoise_marks** out) {
  return make(out, [&] {
    require(parts, "parts");
    std::vector<MarksPtr> components;
    for (size_t i = 0; i < n; ++i) {
      require(parts[i], "parts[i]");
      components.push_back(parts[i]->value);
    }
    return product_marks(std::move(components));
  });
}
void snoise_marks_free(snoise_marks* marks) { delete marks; }

snoise_status snoise_compensator_standard(double lambda, const snoise_marks* marks,
                                          snoise_compensator** out) {
  return make(out, [&] {
    require(marks, "marks");
    return CompensatorSpec::standard(lambda, marks->value);
  });
}
snoise_status snoise_compensator_table(const double* t, const double* rate, size_t n, double bound,
                                       const snoise_marks* marks, snoise_compensator** out) {
  return make(out, [&] {
    require(t, "t");
    require(rate, "rate");
    require(marks, "marks");
    std::vector<std::pair<double, double>> knots;
    for (size_t i = 0; i < n; ++i) knots.emplace_back(t[i], rate[i]);
    return CompensatorSpec(RateCurve::table(std::move(knots)), bound, marks->value);
  });
}
void snoise_compensator_free(snoise_compensator* spec) { delete spec; }

snoise_status snoise_path_new(int mark_dim, double horizon, snoise_path** out) {
  return make(out, [&] { return MppPath(mark_dim, horizon); });
}
snoise_status snoise_path_simulate(const snoise_compensator* spec, double horizon, uint64_t seed,
                                   uint64_t path_index, snoise_path** out) {
  return make(out, [&] {
    require(spec, "spec");
    return simulate_mpp(spec->value, horizon, seed, path_index);
  });
}
snoise_status snoise_path_push(snoise_path* path, double t, const double* x, size_t dim) {
  return guarded([&] {
    require(path, "path");
    require(x, "x");
    if (dim != static_cast<size_t>(path->value.mark_dim())) {
      fail(ErrorCode::DimensionMismatch, "mark length does not match the path's mark dimension");
    }
    path->value.push_back(t, Mark(x, dim));
  });
}
snoise_status snoise_path_size(const snoise_path* path, size_t* size) {
  return guarded([&] {
    require(path, "path");
    require(size, "size");
    *size = path->value.size();
  });
}
snoise_status snoise_path_event(const snoise_path* path, size_t i, double* t, double* x, size_t dim) {
  return guarded([&] {
    require(path, "path");
    if (i >= path->value.size()) fail(ErrorCode::InvalidArgument, "event index out of range");
    if (t) *t = path->value.time(i);
    if (x) {
      const auto mark = path->value.mark(i);
      if (dim != mark.size()) fail(ErrorCode::DimensionMismatch, "mark buffer has the wrong length");
      std::copy(mark.begin(), mark.end(), x);
    }
  });
}
void snoise_path_free(snoise_path* path) { delete path; }

snoise_status snoise_process_new(const snoise_kernel* kernel, const snoise_compensator* spec,
                                 snoise_process** out) {
  return make(out, [&] {
    require(kernel, "kernel");
    require(spec, "spec");
    return ShotNoiseProcess(kernel->value, spec->value);
  });
}
void snoise_process_free(snoise_process* proc) { delete proc; }

snoise_status snoise_process_eval(const snoise_process* proc, const snoise_path* path, double t,
                                  double* value) {
  return guarded([&] {
    require(proc, "proc");
    require(path, "path");
    require(value, "value");
    *value = eval_shotnoise(proc->value, path->value, t);
  });
}

snoise_status snoise_process_cf(const snoise_process* proc, const snoise_path* path, double t,
                                double T, double theta, double quad_tol, double* re, double* im) {
  return guarded([&] {
    require(proc, "proc");
    require(path, "path");
    QuadratureOptions opt;
    if (quad_tol > 0.0) opt.abs_tol = quad_tol;
    const auto cf = conditional_cf(proc->value, FiltrationState(path->value, t), T, theta, opt);
    if (re) *re = cf.real();
    if (im) *im = cf.imag();
  });
}

snoise_status snoise_riccati_terminal(double kappa, double theta_bar, double u1, double u2,
                                      double horizon, int steps, double* out6) {
  return guarded([&] {
    require(out6, "out6");
    HawkesParams p;
    p.kappa = kappa;
    p.theta_bar = theta_bar;
    p.validate();
    const auto sol = riccati_solve(p, transform_boundary({u1, u2}), horizon, steps);
    const std::complex<double> vals[3] = {sol.phi.back(), sol.psi1.back(), sol.psi2.back()};
    for (int k = 0; k < 3; ++k) {
      out6[2 * k] = vals[k].real();
      out6[2 * k + 1] = vals[k].imag();
    }
  });
}

snoise_status snoise_affine_cf(double kappa, double theta_bar, double t, double n, double lambda,
                               double T, double u1, double u2, double* re, double* im) {
  return guarded([&] {
    HawkesParams p;
    p.kappa = kappa;
    p.theta_bar = theta_bar;
    p.lambda0 = lambda;
    p.validate();
    const auto cf = affine_cf(p, AffineState{t, n, lambda}, T, {u1, u2});
    if (re) *re = cf.real();
    if (im) *im = cf.imag();
  });
}

snoise_status snoise_run_scenario(const char* subcommand, const char* config_path, const char* out_dir,
                                  int64_t n_paths, const uint64_t* seed, int* exit_code) {
  int code = kExitNumericalFailure;
  const auto status = guarded([&] {
    require(config_path, "config_path");
    ConfigOverrides overrides;
    if (subcommand) {
      overrides.scenario = parse_scenario(subcommand);
      if (!overrides.scenario) {
        fail(ErrorCode::ConfigError, std::string("unknown subcommand '") + subcommand + "'");
      }
    }
    if (n_paths > 0) overrides.n_paths = static_cast<std::size_t>(n_paths);
    if (seed) overrides.seed = *seed;
    std::string dir = ".";
    if (out_dir) {
      dir = out_dir;
    } else if (const char* env = std::getenv("SNOISE_OUT"); env && *env) {
      dir = env;
    }
    const auto cfg = load_config(config_path, overrides);
    code = run_scenario(cfg, dir).exit_code;
  });
  if (status != SNOISE_OK) {
    code = status == SNOISE_E_INTERNAL ? kExitNumericalFailure
                                       : exit_code_for(static_cast<ErrorCode>(static_cast<int>(status) - 1));
  }
  if (exit_code) *exit_code = code;
  return status;
}

}  // extern "C"
