#include "snoise/marks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "snoise/special.hpp"

namespace snoise {

namespace detail {

double halton(std::size_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % static_cast<std::size_t>(base));
    index /= static_cast<std::size_t>(base);
  }
  return r;
}

}  // namespace detail

std::vector<Atom> MarkDistribution::atoms(double) const {
  fail(ErrorCode::UnsupportedMarks, describe() + " has no atom list");
}
double MarkDistribution::density(double, double) const {
  fail(ErrorCode::UnsupportedMarks, describe() + " has no density");
}
std::pair<double, double> MarkDistribution::support(double) const {
  fail(ErrorCode::UnsupportedMarks, describe() + " has no density support");
}
double MarkDistribution::quantile(double, double, int) const {
  fail(ErrorCode::UnsupportedMarks, describe() + " has no quantile function");
}
double MarkDistribution::cdf(double, double) const {
  fail(ErrorCode::UnsupportedMarks, describe() + " has no CDF");
}
double MarkDistribution::log_mgf(double) const {
  fail(ErrorCode::MgfDiverges, describe() + " has no closed-form moment generating function");
}
MarksPtr MarkDistribution::tilted(double) const {
  fail(ErrorCode::UnsupportedMarks, describe() + " has no closed-form exponential tilt");
}

namespace {

void check_coord(int coord) {
  if (coord != 0) fail(ErrorCode::DimensionMismatch, "one-dimensional law has only coordinate 0");
}

class DiscreteMarks final : public MarkDistribution {
 public:
  DiscreteMarks(std::vector<double> values, std::vector<double> probs)
      : values_(std::move(values)), probs_(std::move(probs)) {
    if (values_.empty() || values_.size() != probs_.size()) {
      fail(ErrorCode::InvalidArgument, "discrete marks need matching, non-empty value/prob lists");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      if (!(probs_[i] >= 0.0) || !std::isfinite(values_[i])) {
        fail(ErrorCode::InvalidArgument, "discrete marks need finite values and probs >= 0");
      }
      total += probs_[i];
    }
    if (std::abs(total - 1.0) > 1e-12) {
      fail(ErrorCode::InvalidArgument, "discrete mark probabilities must sum to 1");
    }
    cumulative_.resize(probs_.size());
    std::partial_sum(probs_.begin(), probs_.end(), cumulative_.begin());
    cumulative_.back() = 1.0;
  }

  int dim() const override { return 1; }
  IntegrationMode mode() const override { return IntegrationMode::Atoms; }
  void sample(double t, RandomStream& rng, std::span<double> out) const override {
    out[0] = quantile(t, rng.uniform());
  }
  std::string describe() const override {
    if (values_.size() == 1) {
      std::ostringstream os;
      os << "point_mass(" << values_[0] << ")";
      return os.str();
    }
    return "discrete(" + std::to_string(values_.size()) + " atoms)";
  }
  std::vector<Atom> atoms(double) const override {
    std::vector<Atom> out;
    for (std::size_t i = 0; i < values_.size(); ++i) out.push_back({{values_[i]}, probs_[i]});
    return out;
  }
  double quantile(double, double u, int coord = 0) const override {
    check_coord(coord);
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    return values_[static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cumulative_.begin(), static_cast<std::ptrdiff_t>(values_.size()) - 1))];
  }
  double cdf(double, double x) const override {
    double c = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] <= x) c += probs_[i];
    }
    return std::min(c, 1.0);
  }
  double log_mgf(double h) const override {
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) m += probs_[i] * std::exp(h * values_[i]);
    return std::log(m);
  }
  MarksPtr tilted(double h) const override {
    std::vector<double> p(probs_.size());
    const double norm = std::exp(log_mgf(h));
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = probs_[i] * std::exp(h * values_[i]) / norm;
    double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= total;
    return std::make_shared<DiscreteMarks>(values_, std::move(p));
  }

 private:
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

class NormalMarks final : public MarkDistribution {
 public:
  NormalMarks(double mean, double sd) : mean_(mean), sd_(sd) {
    if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd)) {
      fail(ErrorCode::InvalidArgument, "normal marks need finite mean and sd > 0");
    }
  }
  int dim() const override { return 1; }
  IntegrationMode mode() const override { return IntegrationMode::Density1D; }
  void sample(double t, RandomStream& rng, std::span<double> out) const override {
    out[0] = quantile(t, rng.uniform());
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "normal(" << mean_ << ", " << sd_ << ")";
    return os.str();
  }
  double density(double, double x) const override {
    const double z = (x - mean_) / sd_;
    return std::exp(-0.5 * z * z) / (sd_ * std::sqrt(2.0 * M_PI));
  }
  std::pair<double, double> support(double) const override {
    return {mean_ - 12.0 * sd_, mean_ + 12.0 * sd_};
  }
  double quantile(double, double u, int coord = 0) const override {
    check_coord(coord);
    return mean_ + sd_ * normal_quantile(u);
  }
  double cdf(double, double x) const override { return normal_cdf((x - mean_) / sd_); }
  double log_mgf(double h) const override { return h * mean_ + 0.5 * h * h * sd_ * sd_; }
  MarksPtr tilted(double h) const override {
    return std::make_shared<NormalMarks>(mean_ + h * sd_ * sd_, sd_);
  }

 private:
  double mean_, sd_;
};

class ExponentialMarks final : public MarkDistribution {
 public:
  explicit ExponentialMarks(double rate) : rate_(rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      fail(ErrorCode::InvalidArgument, "exponential marks need rate > 0");
    }
  }
  int dim() const override { return 1; }
  IntegrationMode mode() const override { return IntegrationMode::Density1D; }
  void sample(double, RandomStream& rng, std::span<double> out) const override {
    out[0] = rng.exponential(rate_);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "exponential(rate=" << rate_ << ")";
    return os.str();
  }
  double density(double, double x) const override {
    return x < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * x);
  }
  std::pair<double, double> support(double) const override { return {0.0, 50.0 / rate_}; }
  double quantile(double, double u, int coord = 0) const override {
    check_coord(coord);
    return -std::log1p(-u) / rate_;
  }
  double cdf(double, double x) const override {
    return x <= 0.0 ? 0.0 : -std::expm1(-rate_ * x);
  }
  double log_mgf(double h) const override {
    if (!(h < rate_)) fail(ErrorCode::MgfDiverges, "exponential mgf diverges for h >= rate");
    return std::log(rate_ / (rate_ - h));
  }
  MarksPtr tilted(double h) const override {
    if (!(h < rate_)) fail(ErrorCode::MgfDiverges, "exponential tilt needs h < rate");
    return std::make_shared<ExponentialMarks>(rate_ - h);
  }

 private:
  double rate_;
};

class UniformMarks final : public MarkDistribution {
 public:
  UniformMarks(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
      fail(ErrorCode::InvalidArgument, "uniform marks need finite lo < hi");
    }
  }
  int dim() const override { return 1; }
  IntegrationMode mode() const override { return IntegrationMode::Density1D; }
  void sample(double t, RandomStream& rng, std::span<double> out) const override {
    out[0] = quantile(t, rng.uniform());
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "uniform(" << lo_ << ", " << hi_ << ")";
    return os.str();
  }
  double density(double, double x) const override {
    return (x < lo_ || x > hi_) ? 0.0 : 1.0 / (hi_ - lo_);
  }
  std::pair<double, double> support(double) const override { return {lo_, hi_}; }
  double quantile(double, double u, int coord = 0) const override {
    check_coord(coord);
    return lo_ + (hi_ - lo_) * u;
  }
  double cdf(double, double x) const override {
    return std::clamp((x - lo_) / (hi_ - lo_), 0.0, 1.0);
  }
  double log_mgf(double h) const override {
    if (h == 0.0) return 0.0;
    return std::log((std::exp(h * hi_) - std::exp(h * lo_)) / (h * (hi_ - lo_)));
  }

 private:
  double lo_, hi_;
};

class ProductMarks final : public MarkDistribution {
 public:
  explicit ProductMarks(std::vector<MarksPtr> parts) : parts_(std::move(parts)) {
    if (parts_.size() < 2) fail(ErrorCode::InvalidArgument, "product marks need >= 2 components");
    all_atoms_ = true;
    for (const auto& p : parts_) {
      if (!p || p->dim() != 1) {
        fail(ErrorCode::InvalidArgument, "product mark components must be one-dimensional");
      }
      if (p->mode() == IntegrationMode::SampleOnly) sample_only_ = true;
      if (p->mode() != IntegrationMode::Atoms) all_atoms_ = false;
    }
  }
  int dim() const override { return static_cast<int>(parts_.size()); }
  IntegrationMode mode() const override {
    if (sample_only_) return IntegrationMode::SampleOnly;
    return all_atoms_ ? IntegrationMode::Atoms : IntegrationMode::QuasiRandom;
  }
  void sample(double t, RandomStream& rng, std::span<double> out) const override {
    for (std::size_t k = 0; k < parts_.size(); ++k) parts_[k]->sample(t, rng, out.subspan(k, 1));
  }
  std::string describe() const override {
    std::string s = "product(";
    for (std::size_t k = 0; k < parts_.size(); ++k) {
      s += (k ? ", " : "") + parts_[k]->describe();
    }
    return s + ")";
  }
  std::vector<Atom> atoms(double t) const override {
    std::vector<Atom> out{{{}, 1.0}};
    for (const auto& p : parts_) {
      std::vector<Atom> next;
      for (const auto& head : out) {
        for (const auto& a : p->atoms(t)) {
          Atom c = head;
          c.x.push_back(a.x[0]);
          c.weight *= a.weight;
          next.push_back(std::move(c));
        }
      }
      out = std::move(next);
    }
    return out;
  }
  double quantile(double t, double u, int coord = 0) const override {
    if (coord < 0 || coord >= dim()) fail(ErrorCode::DimensionMismatch, "bad mark coordinate");
    return parts_[static_cast<std::size_t>(coord)]->quantile(t, u, 0);
  }
  double cdf(double t, double x) const override { return parts_[0]->cdf(t, x); }
  double log_mgf(double h) const override { return parts_[0]->log_mgf(h); }
  MarksPtr tilted(double h) const override {
    auto parts = parts_;
    parts[0] = parts_[0]->tilted(h);
    return std::make_shared<ProductMarks>(std::move(parts));
  }

 private:
  std::vector<MarksPtr> parts_;
  bool all_atoms_ = false;
  bool sample_only_ = false;
};

class SampleOnlyMarks final : public MarkDistribution {
 public:
  SampleOnlyMarks(int dim, std::function<void(double, RandomStream&, std::span<double>)> s,
                  std::string name)
      : dim_(dim), sampler_(std::move(s)), name_(std::move(name)) {
    if (dim_ < 1 || !sampler_) fail(ErrorCode::InvalidArgument, "sample-only marks need a sampler");
  }
  int dim() const override { return dim_; }
  IntegrationMode mode() const override { return IntegrationMode::SampleOnly; }
  void sample(double t, RandomStream& rng, std::span<double> out) const override {
    sampler_(t, rng, out);
  }
  std::string describe() const override { return name_; }

 private:
  int dim_;
  std::function<void(double, RandomStream&, std::span<double>)> sampler_;
  std::string name_;
};

}  // namespace

MarksPtr point_mass(double u) { return std::make_shared<DiscreteMarks>(std::vector{u}, std::vector{1.0}); }
MarksPtr discrete_marks(std::vector<double> values, std::vector<double> probs) {
  return std::make_shared<DiscreteMarks>(std::move(values), std::move(probs));
}
MarksPtr normal_marks(double mean, double sd) { return std::make_shared<NormalMarks>(mean, sd); }
MarksPtr exponential_marks(double rate) { return std::make_shared<ExponentialMarks>(rate); }
MarksPtr uniform_marks(double lo, double hi) { return std::make_shared<UniformMarks>(lo, hi); }
MarksPtr product_marks(std::vector<MarksPtr> components) {
  return std::make_shared<ProductMarks>(std::move(components));
}
MarksPtr sample_only_marks(int dim,
                           std::function<void(double, RandomStream&, std::span<double>)> sampler,
                           std::string name) {
  return std::make_shared<SampleOnlyMarks>(dim, std::move(sampler), std::move(name));
}

}  // namespace snoise
