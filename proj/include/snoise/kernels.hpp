#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace snoise {

using Mark = std::span<const double>;
using KernelFn = std::function<double(double t, Mark x)>;

enum class KernelKind { JumpToLevel, Exponential, PowerLaw, RandomDecay, Custom };

std::string_view kernel_kind_name(KernelKind kind) noexcept;

// Noise kernel G(t, x) together with its time derivative g(t, x), so that
// G(t, x) = G(0, x) + int_0^t g(s, x) ds. Immutable after construction.
class NoiseKernel {
 public:
  static NoiseKernel jump_to_level();
  static NoiseKernel exponential(double a, double b);
  static NoiseKernel power_law(double c);
  static NoiseKernel random_decay();

  // User-supplied pair. Consistency of G and g is checked on a probe grid over
  // [0, probe_horizon] and InconsistentKernel is thrown when the residual of
  // the integral identity exceeds quad_tol. `breaks` lists known kinks of g.
  static NoiseKernel custom(KernelFn G, KernelFn g, int mark_dim,
                            double probe_horizon = 5.0, double quad_tol = 1e-8,
                            std::vector<double> breaks = {});

  // Tabulated one-dimensional kernel from (t, x, G) triples forming a full
  // rectangular grid. G is bilinear between nodes, linear in x beyond the
  // outermost x nodes and constant in t after the last t node.
  struct TablePoint {
    double t;
    double x;
    double G;
  };
  static NoiseKernel table(std::span<const TablePoint> points);

  KernelKind kind() const noexcept { return kind_; }
  int mark_dim() const noexcept { return mark_dim_; }
  const std::vector<double>& parameters() const noexcept { return params_; }
  // Times where g may be discontinuous (table nodes); empty for smooth kinds.
  const std::vector<double>& breaks() const noexcept { return breaks_; }

  // Checked evaluation: validates t and the mark length, rejects non-finite
  // results.
  double G(double t, Mark x) const;
  double g(double t, Mark x) const;

  // Unchecked evaluation for inner loops that already validated inputs.
  double G_unchecked(double t, Mark x) const { return G_(t, x); }
  double g_unchecked(double t, Mark x) const { return g_(t, x); }

  // (a, b) when the kernel is Exponential(a, b).
  std::optional<std::pair<double, double>> exponential_params() const;

  std::string describe() const;

 private:
  NoiseKernel(KernelKind kind, KernelFn G, KernelFn g, int mark_dim,
              std::vector<double> params);

  void check_mark(Mark x) const;

  KernelKind kind_;
  KernelFn G_;
  KernelFn g_;
  int mark_dim_;
  std::vector<double> params_;
  std::vector<double> breaks_;
};

double eval_G(const NoiseKernel& kernel, double t, Mark x);

// max over the (t, x) probe set of |G(t,x) - G(0,x) - int_0^t g(s,x) ds|.
double continuity_residual(const NoiseKernel& kernel, std::span<const double> times,
                           std::span<const std::vector<double>> marks,
                           double quad_tol = 1e-8);

struct MarkovFit {
  bool markov = false;
  double a = 0.0;
  double b = 0.0;
  // Largest |H(s-t)H(t) - H(s)H(0)| / H(0)^2 over grid pairs t <= s.
  double max_residual = 0.0;
};

// Finite-grid test of the multiplicative Cauchy relation for separable
// kernels G(t, x) = x_1 H(t). Only certifies behaviour on the grid; the range
// condition of the underlying characterization is replaced by H(0) != 0.
MarkovFit is_markov_kernel(const NoiseKernel& kernel, std::span<const double> grid,
                           double tol = 1e-10);

// H(t) = G(t, x)/x_1 after verifying separability on the probe set.
// Throws NotSeparable.
double separable_profile(const NoiseKernel& kernel, double t);

std::vector<double> uniform_grid(double t0, double t1, std::size_t points);

}  // namespace snoise
