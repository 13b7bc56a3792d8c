#include "udn/ase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "udn/parallel.hpp"
#include "udn/quadrature.hpp"
#include "udn/units.hpp"

namespace udn {

namespace {

// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes with
// the three-point end conditions).
class Pchip {
 public:
  Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)), d_(x_.size()) {
    const std::size_t n = x_.size();
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        d_[i] = 0.0;
      } else {
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  double operator()(double x) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i] + (-2 * t3 + 3 * t2) * y_[i + 1] +
           (t3 - t2) * h * d_[i + 1];
  }

 private:
  static double end_slope(double h0, double h1, double m0, double m1) {
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (std::signbit(d) != std::signbit(m0) || m0 == 0.0) return 0.0;
    if (std::signbit(m0) != std::signbit(m1) && std::abs(d) > 3.0 * std::abs(m0)) d = 3.0 * m0;
    return d;
  }

  std::vector<double> x_, y_, d_;
};

struct CurveIntegral {
  double value;      // ∫ p(γ)/(1+γ) dγ from γ0 to the last sample
  double p_at_gamma0;
  double spread;     // |monotone cubic - piecewise linear|, an interpolation-error proxy
};

// Integrates in x = ln γ, where dγ/(1+γ) = e^x/(1+e^x) dx.
CurveIntegral integrate_curve(const std::vector<CurvePoint>& pts, double gamma0) {
  std::vector<double> xs, ps;
  for (const auto& c : pts) {
    xs.push_back(std::log(c.gamma));
    ps.push_back(c.p);
  }
  const Pchip cubic(xs, ps);
  const double x0 = std::log(gamma0);
  auto logistic = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };

  double smooth = 0.0;
  double linear = 0.0;
  const QuadOptions opts{1e-13, 1e-12, 200};
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double lo = std::max(xs[i], x0);
    const double hi = xs[i + 1];
    if (hi <= lo) continue;
    smooth += integrate([&](double x) { return cubic(x) * logistic(x); }, lo, hi, opts).value;
    const double slope = (ps[i + 1] - ps[i]) / (xs[i + 1] - xs[i]);
    linear += integrate([&](double x) { return (ps[i] + slope * (x - xs[i])) * logistic(x); }, lo, hi, opts).value;
  }
  return {smooth, std::clamp(cubic(x0), 0.0, 1.0), std::abs(smooth - linear)};
}

void check_curve(std::vector<CurvePoint>& samples, double gamma0) {
  if (samples.size() < 4) throw std::invalid_argument("a coverage curve needs at least four samples");
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.gamma < b.gamma; });
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].gamma > 0.0) || !std::isfinite(samples[i].gamma))
      throw std::invalid_argument("curve thresholds must be positive and finite");
    if (!(samples[i].p >= 0.0 && samples[i].p <= 1.0)) throw std::invalid_argument("curve values must lie in [0, 1]");
    if (i > 0 && samples[i].gamma == samples[i - 1].gamma)
      throw std::invalid_argument("curve thresholds must be distinct");
  }
  if (!(gamma0 >= samples.front().gamma && gamma0 <= samples.back().gamma))
    throw std::invalid_argument("gamma0 lies outside the sampled threshold range");
}

}  // namespace

CoverageCurveCache::Key CoverageCurveCache::key(const NetworkConfig& cfg, SchedulerKind s, CoverageMethod m,
                                                double gamma) {
  return {cfg.lambda, cfg.rho, cfg.q, cfg.tx_power, cfg.noise_power, cfg.epsilon,
          static_cast<int>(s), static_cast<int>(m), gamma};
}

bool CoverageCurveCache::lookup(const Key& k, CoverageResult& out) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(k);
  if (it == entries_.end()) return false;
  out = it->second;
  return true;
}

void CoverageCurveCache::store(const Key& k, const CoverageResult& r) {
  std::lock_guard lock(mutex_);
  entries_.emplace(k, r);
}

std::size_t CoverageCurveCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

double ase_from_curve(std::vector<CurvePoint> samples, double lambda_tilde, double gamma0) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be positive");
  check_curve(samples, gamma0);
  const auto ci = integrate_curve(samples, gamma0);
  return lambda_tilde / std::numbers::ln2 * ci.value + lambda_tilde * std::log2(1.0 + gamma0) * ci.p_at_gamma0;
}

AseResult ase(const AseQuery& query, const AseOptions& opts, CoverageCurveCache* cache) {
  if (!(query.gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be positive");
  const CoverageEngine engine(query.cfg, query.model, opts.coverage);
  const UeCountDistribution dist = engine.distribution_for(query.scheduler, query.method);

  AseResult out;
  out.lambda_tilde = engine.lambda_tilde();

  // Threshold grid in dB; results keyed by the dB value.
  std::map<double, CoverageResult> points;
  auto evaluate_batch = [&](const std::vector<double>& dbs) {
    std::vector<CoverageResult> results(dbs.size());
    parallel_for(dbs.size(), opts.workers, [&](std::size_t i) {
      const double g = db_to_linear(dbs[i]);
      const auto k = CoverageCurveCache::key(query.cfg, query.scheduler, query.method, g);
      if (cache && cache->lookup(k, results[i])) return;
      results[i] = engine.coverage_with(g, dist, query.method);
      if (cache) cache->store(k, results[i]);
    });
    for (std::size_t i = 0; i < dbs.size(); ++i) points.emplace(dbs[i], std::move(results[i]));
  };

  const double db0 = linear_to_db(query.gamma0);
  const double db_max = linear_to_db(opts.gamma_max);
  const unsigned batch = std::max(4u, opts.workers == 0 ? default_workers() : opts.workers);
  double next_db = db0;
  bool done = false;
  while (!done) {
    std::vector<double> dbs;
    for (unsigned i = 0; i < batch && next_db <= db_max + 1e-9; ++i, next_db += opts.initial_step_db)
      dbs.push_back(std::min(next_db, db_max));
    if (dbs.empty()) break;
    evaluate_batch(dbs);
    done = points.rbegin()->second.value < opts.p_floor || next_db > db_max + 1e-9;
  }
  // Drop the points beyond the first one below the floor.
  for (auto it = points.begin(); it != points.end(); ++it) {
    if (it->second.value < opts.p_floor) {
      points.erase(std::next(it), points.end());
      break;
    }
  }

  // Bisect intervals where coverage changes quickly.
  for (;;) {
    std::vector<double> mids;
    for (auto it = points.begin(); std::next(it) != points.end(); ++it) {
      const auto nx = std::next(it);
      const double step = nx->first - it->first;
      if (step > opts.min_step_db * 1.5 && std::abs(nx->second.value - it->second.value) > opts.refine_dp)
        mids.push_back(0.5 * (it->first + nx->first));
    }
    if (mids.empty()) break;
    evaluate_batch(mids);
  }

  double coverage_error = 0.0;
  for (const auto& [db, r] : points) {
    out.curve.push_back({db_to_linear(db), r.value});
    out.fell_back = out.fell_back || r.fell_back;
    coverage_error = std::max(coverage_error, r.quad_error);
    for (const auto& w : r.warnings) out.warnings.push_back(w);
  }
  // The cubic needs four samples; pad short grids (coverage already below the
  // floor at γ0) by extending or bisecting the last interval.
  while (points.size() < 4) {
    const double last_db = points.rbegin()->first;
    evaluate_batch({points.size() < 2 ? last_db + opts.initial_step_db
                                      : 0.5 * (std::next(points.rbegin())->first + last_db)});
  }
  out.curve.clear();
  for (const auto& [db, r] : points) out.curve.push_back({db_to_linear(db), r.value});

  const auto ci = integrate_curve(out.curve, query.gamma0);
  const double lt = out.lambda_tilde;
  const double x_span = std::log(out.curve.back().gamma) - std::log(query.gamma0);
  out.value = lt / std::numbers::ln2 * ci.value + lt * std::log2(1.0 + query.gamma0) * points.begin()->second.value;
  // The tail beyond the grid is bounded by p_last per unit of ln γ; one e-fold is used as the estimate.
  const double tail = out.curve.back().p;
  out.error = lt / std::numbers::ln2 * (ci.spread + coverage_error * x_span + tail) +
              lt * std::log2(1.0 + query.gamma0) * coverage_error;
  return out;
}

}  // namespace udn
