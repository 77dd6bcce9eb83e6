#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "snoise/error.hpp"
#include "snoise/quadrature.hpp"
#include "snoise/rng.hpp"

namespace snoise {

// How expectations against the mark law are computed.
enum class IntegrationMode {
  Atoms,        // finite support, exact summation
  Density1D,    // one-dimensional density, adaptive quadrature
  QuasiRandom,  // multivariate, Halton averaging through component quantiles
  SampleOnly,   // sampler only; analytic routines refuse it
};

struct Atom {
  std::vector<double> x;
  double weight;
};

// Time-indexed mark law F(t, dx) on R^d. Built-in laws are time-homogeneous;
// the time argument is kept so inhomogeneous laws can be plugged in.
class MarkDistribution {
 public:
  virtual ~MarkDistribution() = default;

  virtual int dim() const = 0;
  virtual IntegrationMode mode() const = 0;
  virtual bool time_homogeneous() const { return true; }
  virtual void sample(double t, RandomStream& rng, std::span<double> out) const = 0;
  virtual std::string describe() const = 0;

  // Atoms mode.
  virtual std::vector<Atom> atoms(double t) const;
  // Density1D mode: density and the (truncated) integration range.
  virtual double density(double t, double x) const;
  virtual std::pair<double, double> support(double t) const;
  // Inverse CDF of one coordinate; drives QuasiRandom integration.
  virtual double quantile(double t, double u, int coord = 0) const;
  // One-dimensional CDF; used by goodness-of-fit checks.
  virtual double cdf(double t, double x) const;
  // log E[exp(h X_1)] when available in closed form.
  virtual double log_mgf(double h) const;
  // Law with density proportional to exp(h x_1) with respect to this one.
  virtual std::shared_ptr<const MarkDistribution> tilted(double h) const;
};

using MarksPtr = std::shared_ptr<const MarkDistribution>;

MarksPtr point_mass(double u);
MarksPtr discrete_marks(std::vector<double> values, std::vector<double> probs);
MarksPtr normal_marks(double mean, double sd);
MarksPtr exponential_marks(double rate);
MarksPtr uniform_marks(double lo, double hi);
// Independent components; each must be one-dimensional.
MarksPtr product_marks(std::vector<MarksPtr> components);
// Sampler-only law; analytic quadrature refuses it with UnsupportedMarks.
MarksPtr sample_only_marks(int dim,
                           std::function<void(double, RandomStream&, std::span<double>)> sampler,
                           std::string name = "sample_only");

struct MarkQuadrature {
  double abs_tol = 1e-9;
  int halton_points = 8192;
};

namespace detail {
double halton(std::size_t index, int base);
}

// E_F(t)[f(X)] by the law's declared integration mode. V is double or
// std::complex<double>.
template <class V, class F>
V expect_marks(const MarkDistribution& marks, double t, const F& f,
               const MarkQuadrature& opt = {}) {
  switch (marks.mode()) {
    case IntegrationMode::Atoms: {
      V total{};
      for (const auto& atom : marks.atoms(t)) total += atom.weight * f(std::span<const double>(atom.x));
      return total;
    }
    case IntegrationMode::Density1D: {
      const auto [lo, hi] = marks.support(t);
      QuadratureOptions q;
      q.abs_tol = opt.abs_tol;
      return adaptive_simpson<V>(
          [&](double x) -> V {
            const double dens = marks.density(t, x);
            if (dens == 0.0) return V{};
            return dens * f(std::span<const double>(&x, 1));
          },
          lo, hi, q);
    }
    case IntegrationMode::QuasiRandom: {
      static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
      const int d = marks.dim();
      if (d > 12) fail(ErrorCode::UnsupportedMarks, "quasi-random integration supports d <= 12");
      std::vector<double> x(static_cast<std::size_t>(d));
      V total{};
      for (int n = 1; n <= opt.halton_points; ++n) {
        for (int k = 0; k < d; ++k) {
          x[static_cast<std::size_t>(k)] =
              marks.quantile(t, detail::halton(static_cast<std::size_t>(n), kPrimes[k]), k);
        }
        total += f(std::span<const double>(x));
      }
      return total / static_cast<double>(opt.halton_points);
    }
    case IntegrationMode::SampleOnly:
      break;
  }
  fail(ErrorCode::UnsupportedMarks,
       "mark law '" + marks.describe() +
           "' is sample-only; use the Monte Carlo oracle instead of quadrature");
}

}  // namespace snoise
