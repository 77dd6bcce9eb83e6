#include "snoise/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace snoise {

RateCurve RateCurve::constant(double value) {
  if (!std::isfinite(value)) fail(ErrorCode::InvalidArgument, "rate must be finite");
  RateCurve c;
  c.fn_ = [value](double) { return value; };
  std::ostringstream os;
  os << "constant(" << value << ")";
  c.name_ = os.str();
  c.constant_ = value;
  c.piecewise_linear_ = true;
  return c;
}

RateCurve RateCurve::table(std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) fail(ErrorCode::InvalidArgument, "rate table needs at least one knot");
  std::sort(knots.begin(), knots.end());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second)) {
      fail(ErrorCode::InvalidArgument, "rate table entries must be finite");
    }
    if (i > 0 && knots[i].first == knots[i - 1].first) {
      fail(ErrorCode::InvalidArgument, "rate table has duplicate times");
    }
  }
  RateCurve c;
  c.fn_ = [knots](double t) {
    if (t <= knots.front().first) return knots.front().second;
    if (t >= knots.back().first) return knots.back().second;
    const auto hi = std::upper_bound(knots.begin(), knots.end(), t,
                                     [](double v, const auto& k) { return v < k.first; });
    const auto lo = hi - 1;
    const double w = (t - lo->first) / (hi->first - lo->first);
    return (1 - w) * lo->second + w * hi->second;
  };
  for (const auto& k : knots) c.breaks_.push_back(k.first);
  c.name_ = "table(" + std::to_string(knots.size()) + " knots)";
  if (knots.size() == 1) c.constant_ = knots.front().second;
  c.piecewise_linear_ = true;
  return c;
}

RateCurve RateCurve::linear(double intercept, double slope) {
  if (!std::isfinite(intercept) || !std::isfinite(slope)) {
    fail(ErrorCode::InvalidArgument, "linear rate needs finite coefficients");
  }
  RateCurve c;
  c.fn_ = [intercept, slope](double t) { return intercept + slope * t; };
  std::ostringstream os;
  os << "linear(" << intercept << " + " << slope << " t)";
  c.name_ = os.str();
  if (slope == 0.0) c.constant_ = intercept;
  c.piecewise_linear_ = true;
  return c;
}

RateCurve RateCurve::custom(std::function<double(double)> fn, std::vector<double> breaks,
                            std::string name) {
  if (!fn) fail(ErrorCode::InvalidArgument, "custom rate needs a function");
  std::sort(breaks.begin(), breaks.end());
  RateCurve c;
  c.fn_ = std::move(fn);
  c.breaks_ = std::move(breaks);
  c.name_ = std::move(name);
  return c;
}

namespace {

// Candidate points where an extremum of the curve on [t0, t1] can sit.
std::vector<double> extremum_candidates(const std::vector<double>& breaks, bool exact, double t0,
                                        double t1) {
  std::vector<double> pts{t0, t1};
  for (double b : breaks) {
    if (b > t0 && b < t1) pts.push_back(b);
  }
  if (!exact) {
    const auto dense = uniform_grid(t0, t1, 1025);
    pts.insert(pts.end(), dense.begin(), dense.end());
  }
  return pts;
}

}  // namespace

double RateCurve::max_on(double t0, double t1) const {
  double m = -INFINITY;
  for (double t : extremum_candidates(breaks_, piecewise_linear_, t0, t1)) m = std::max(m, fn_(t));
  return m;
}

double RateCurve::min_on(double t0, double t1) const {
  double m = INFINITY;
  for (double t : extremum_candidates(breaks_, piecewise_linear_, t0, t1)) m = std::min(m, fn_(t));
  return m;
}

double RateCurve::integral(double t0, double t1, double abs_tol) const {
  if (constant_) return *constant_ * (t1 - t0);
  QuadratureOptions opt;
  opt.abs_tol = abs_tol;
  return adaptive_simpson_breaks([this](double s) { return fn_(s); }, t0, t1, breaks_, opt);
}

CompensatorSpec::CompensatorSpec(RateCurve rate, double rate_bound, MarksPtr marks)
    : rate_(std::move(rate)), rate_bound_(rate_bound), marks_(std::move(marks)) {
  if (!marks_) fail(ErrorCode::InvalidArgument, "compensator needs a mark law");
  if (!(rate_bound_ > 0.0) || !std::isfinite(rate_bound_)) {
    fail(ErrorCode::InvalidBound, "rate_bound must be finite and > 0");
  }
}

CompensatorSpec CompensatorSpec::standard(double lambda, MarksPtr marks) {
  if (!(lambda >= 0.0)) fail(ErrorCode::InvalidArgument, "jump rate must be >= 0");
  return CompensatorSpec(RateCurve::constant(lambda), lambda > 0.0 ? lambda : 1.0,
                         std::move(marks));
}

std::string CompensatorSpec::describe() const {
  std::ostringstream os;
  os << "rate=" << rate_.describe() << " bound=" << rate_bound_ << " marks=" << marks_->describe();
  return os.str();
}

MppPath::MppPath(int mark_dim, double horizon) : mark_dim_(mark_dim), horizon_(horizon) {
  if (mark_dim < 1) fail(ErrorCode::InvalidArgument, "mark_dim must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    fail(ErrorCode::InvalidArgument, "path horizon must be finite and > 0");
  }
}

void MppPath::push_back(double t, Mark x) {
  if (x.size() != static_cast<std::size_t>(mark_dim_)) {
    fail(ErrorCode::DimensionMismatch, "event mark has wrong dimension");
  }
  if (!(t > 0.0) || !(t <= horizon_)) {
    fail(ErrorCode::InvalidArgument, "event time must lie in (0, horizon]");
  }
  if (!times_.empty()) {
    if (t < times_.back()) fail(ErrorCode::InvalidArgument, "event times must be increasing");
    if (t == times_.back()) t = std::nextafter(t, INFINITY);
  }
  times_.push_back(t);
  marks_.insert(marks_.end(), x.begin(), x.end());
}

std::size_t MppPath::count_upto(double t) const {
  return static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) -
                                  times_.begin());
}

std::size_t MppPath::count_before(double t) const {
  return static_cast<std::size_t>(std::lower_bound(times_.begin(), times_.end(), t) -
                                  times_.begin());
}

MppPath MppPath::restricted(double t) const {
  MppPath out(mark_dim_, t > 0.0 ? t : horizon_);
  const std::size_t n = count_upto(t);
  out.times_.assign(times_.begin(), times_.begin() + static_cast<std::ptrdiff_t>(n));
  out.marks_.assign(marks_.begin(),
                    marks_.begin() + static_cast<std::ptrdiff_t>(n * static_cast<std::size_t>(mark_dim_)));
  return out;
}

std::vector<double> MppPath::cumulative_marks(double t) const {
  std::vector<double> z(static_cast<std::size_t>(mark_dim_), 0.0);
  const std::size_t n = count_upto(t);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = mark(i);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += x[k];
  }
  return z;
}

namespace {

void check_intensity(double lam, double bound, double t) {
  if (!(lam >= 0.0) || !std::isfinite(lam)) {
    fail(ErrorCode::InvalidArgument, "intensity must be finite and >= 0 (t=" + std::to_string(t) + ")");
  }
  if (lam > bound * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "intensity " << lam << " at t=" << t << " exceeds rate_bound " << bound;
    fail(ErrorCode::InvalidBound, os.str());
  }
}

}  // namespace

MppPath simulate_mpp(const CompensatorSpec& spec, double horizon, std::uint64_t seed,
                     std::uint64_t path_index, std::size_t event_cap) {
  MppPath path(spec.mark_dim(), horizon);
  const double bound = spec.rate_bound();
  for (double t : uniform_grid(0.0, horizon, 65)) check_intensity(spec.rate(t), bound, t);
  if (spec.constant_rate() && *spec.constant_rate() == 0.0) return path;

  RandomStream arrivals(seed, path_index, StreamTag::Arrivals);
  RandomStream coins(seed, path_index, StreamTag::Acceptance);
  RandomStream marks(seed, path_index, StreamTag::Marks);
  std::vector<double> x(static_cast<std::size_t>(spec.mark_dim()));
  double t = 0.0;
  for (;;) {
    t += arrivals.exponential(bound);
    if (t > horizon) break;
    const double lam = spec.rate(t);
    check_intensity(lam, bound, t);
    if (coins.uniform() * bound > lam) continue;
    spec.marks().sample(t, marks, x);
    path.push_back(t, x);
    if (path.size() > event_cap) {
      fail(ErrorCode::ExplosionGuard,
           "event count exceeded cap " + std::to_string(event_cap));
    }
  }
  return path;
}

}  // namespace snoise
