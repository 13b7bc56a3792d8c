#include "udn/coverage.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "udn/diagnostics.hpp"
#include "udn/errors.hpp"

namespace udn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

double los_weight(const PathLossPiece& p, double u, Branch b) {
  const double pr = evaluate(p.los_prob, u);
  return b == Branch::LoS ? pr : 1.0 - pr;
}

}  // namespace

const char* to_string(CoverageMethod m) {
  switch (m) {
    case CoverageMethod::Exact: return "exact";
    case CoverageMethod::UpperBound: return "upper";
    case CoverageMethod::MonteCarlo: return "mc";
  }
  return "?";
}

CoverageEngine::CoverageEngine(NetworkConfig cfg, PathLossModel model, CoverageOptions opts)
    : cfg_(cfg), model_(std::move(model)), opts_(opts), lambda_tilde_(active_bs_density(cfg_)), inner_(opts_.inner) {
  const auto& last = model_.pieces().back();
  if (last.alpha_nlos <= 2.0 || (last.alpha_los <= 2.0 && !std::holds_alternative<ExpDecayLos>(last.los_prob)))
    throw ConfigError("path-loss exponents of the last piece must exceed 2 for finite interference");
  inner_.abs_tol = std::max(opts_.inner.abs_tol, opts_.exponent_abs_tol / (kTwoPi * cfg_.lambda));
}

double CoverageEngine::los_moment(double x_km) const {
  if (!(x_km > 0.0)) return 0.0;
  if (std::isinf(x_km)) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (const auto& p : model_.pieces()) {
    if (p.d_lo >= x_km) break;
    const double hi = std::min(p.d_hi, x_km);
    total += integrate([&](double u) { return evaluate(p.los_prob, u) * u; }, p.d_lo, hi, inner_).value;
  }
  return total;
}

double CoverageEngine::serving_pdf(double r_km, Branch b) const {
  if (!(r_km > 0.0)) throw DomainError("distance must be positive");
  const double pr = model_.los_probability(r_km);
  const double own = b == Branch::LoS ? pr : 1.0 - pr;
  if (own <= 0.0) return 0.0;
  const double g = model_.gain(r_km, b);
  double exponent;
  if (b == Branch::LoS) {
    exponent = nlos_moment(model_.inverse_gain(g, Branch::NLoS)) + los_moment(r_km);
  } else {
    exponent = los_moment(model_.inverse_gain(g, Branch::LoS)) + nlos_moment(r_km);
  }
  return std::exp(-kTwoPi * cfg_.lambda * exponent) * own * kTwoPi * r_km * cfg_.lambda;
}

double CoverageEngine::piece_tail_integral(double s, double lower, Branch interferer) const {
  const double sp = s * cfg_.tx_power;
  double total = 0.0;
  for (const auto& p : model_.pieces()) {
    if (p.d_hi <= lower) continue;
    const double lo = std::max(p.d_lo, lower);
    const double a = p.amplitude(interferer);
    const double alpha = p.exponent(interferer);
    auto f = [&](double u) {
      const double w = los_weight(p, u, interferer);
      if (w == 0.0) return 0.0;
      const double x = sp * a * std::pow(u, -alpha);
      return w * u * (x / (1.0 + x));
    };
    if (std::isinf(p.d_hi)) {
      // Map around the distance where the interferer's received power equals 1/s.
      const double knee = std::pow(sp * a, 1.0 / alpha);
      total += integrate_to_infinity(f, lo, std::max(lo, knee), inner_).value;
    } else {
      total += integrate(f, lo, p.d_hi, inner_).value;
    }
  }
  return total;
}

double CoverageEngine::laplace_exponent(double s, double r_km, Branch b) const {
  if (!(s >= 0.0)) throw DomainError("Laplace argument must be non-negative");
  if (!(r_km > 0.0)) throw DomainError("distance must be positive");
  if (s == 0.0) return 0.0;
  const double g = model_.gain(r_km, b);
  // Interferers are the BSs whose gain is below the serving one.
  const double lower_los = b == Branch::LoS ? r_km : model_.inverse_gain(g, Branch::LoS);
  const double lower_nlos = b == Branch::NLoS ? r_km : model_.inverse_gain(g, Branch::NLoS);
  const double integral = piece_tail_integral(s, lower_los, Branch::LoS) + piece_tail_integral(s, lower_nlos, Branch::NLoS);
  return kTwoPi * lambda_tilde_ * integral;
}

double CoverageEngine::laplace(double s, double r_km, Branch b) const { return std::exp(-laplace_exponent(s, r_km, b)); }

double CoverageEngine::noise_factor(double gamma, double r_km, Branch b) const {
  const double x = gamma * cfg_.noise_power / (cfg_.tx_power * model_.gain(r_km, b));
  return std::exp(opts_.inject_delta_sign_error ? x : -x);
}

double CoverageEngine::conditional_exact(double r_km, Branch b, double gamma, const UeCountDistribution& dist) const {
  const int kmax = dist.kmax();
  const double zeta = model_.gain(r_km, b);
  const double base_s = gamma / (cfg_.tx_power * zeta);
  const double noise = gamma * cfg_.noise_power / (cfg_.tx_power * zeta);
  const double log_delta = opts_.inject_delta_sign_error ? noise : -noise;

  std::vector<double> log_fact(static_cast<std::size_t>(kmax) + 1);
  for (int i = 0; i <= kmax; ++i) log_fact[static_cast<std::size_t>(i)] = std::lgamma(i + 1.0);
  // log(δ^t L(tγ/(Pζ))), filled as k grows.
  std::vector<double> log_dl(static_cast<std::size_t>(kmax) + 1, 0.0);

  CompensatedSum total;
  double magnitude = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    log_dl[static_cast<std::size_t>(k)] = k * log_delta - laplace_exponent(k * base_s, r_km, b);
    const double fk = dist.pmf(k);
    if (fk == 0.0) continue;

    CompensatedSum inner;
    double largest = 0.0;
    for (int t = 1; t <= k; ++t) {
      const double log_binom = log_fact[static_cast<std::size_t>(k)] - log_fact[static_cast<std::size_t>(t)] -
                               log_fact[static_cast<std::size_t>(k - t)];
      const double mag = std::exp(log_binom + log_dl[static_cast<std::size_t>(t)]);
      largest = std::max(largest, mag);
      inner.add(t % 2 == 1 ? mag : -mag);
    }
    total.add(fk * inner.value());
    magnitude += fk * largest;

    const double amplification = magnitude / std::max(std::abs(total.value()), 1e-12);
    if (amplification > opts_.instability_ratio) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "alternating sum unstable at k=%d (terms %.3g times the result) for r=%.6g km, gamma=%.6g", k,
                    amplification, r_km, gamma);
      throw InstabilityError(buf, amplification);
    }
  }
  return total.value();
}

double CoverageEngine::conditional_upper(double r_km, Branch b, double gamma, const UeCountDistribution& dist) const {
  const double zeta = model_.gain(r_km, b);
  const double x = noise_factor(gamma, r_km, b) * laplace(gamma / (cfg_.tx_power * zeta), r_km, b);
  CompensatedSum total;
  for (int k = 1; k <= dist.kmax(); ++k) {
    const double fk = dist.pmf(k);
    if (fk == 0.0) continue;
    const double hit = x < 1.0 ? -std::expm1(k * std::log1p(-x)) : 1.0 - std::pow(1.0 - x, k);
    total.add(fk * hit);
  }
  return total.value();
}

CoverageResult CoverageEngine::integrate_outer(double gamma, const UeCountDistribution& dist,
                                               CoverageMethod method) const {
  CoverageResult out;
  out.method = method;
  out.kmax = dist.kmax();
  out.terms.resize(static_cast<std::size_t>(model_.size()));
  const double scale = 1.0 / std::sqrt(cfg_.lambda);

  for (int n = 0; n < model_.size(); ++n) {
    const auto& p = model_.piece(n);
    for (Branch b : {Branch::LoS, Branch::NLoS}) {
      auto f = [&](double r) {
        const double pdf = serving_pdf(r, b);
        if (pdf == 0.0) return 0.0;
        const double cond = method == CoverageMethod::Exact ? conditional_exact(r, b, gamma, dist)
                                                            : conditional_upper(r, b, gamma, dist);
        return cond * pdf;
      };
      const QuadResult q = std::isinf(p.d_hi) ? integrate_to_infinity(f, p.d_lo, std::max(p.d_lo, scale), opts_.outer)
                                              : integrate(f, p.d_lo, p.d_hi, opts_.outer);
      (b == Branch::LoS ? out.terms[static_cast<std::size_t>(n)].los : out.terms[static_cast<std::size_t>(n)].nlos) =
          q.value;
      out.raw_value += q.value;
      out.quad_error += q.abs_error;
      out.evaluations += q.evaluations;
      if (!q.converged) out.warnings.push_back("outer quadrature did not converge on piece " + std::to_string(n));
    }
  }
  return out;
}

CoverageResult CoverageEngine::coverage_with(double gamma, const UeCountDistribution& dist,
                                             CoverageMethod method) const {
  if (!(gamma > 0.0)) throw DomainError("SINR threshold must be positive");
  if (method == CoverageMethod::MonteCarlo) throw std::invalid_argument("the analytic engine has no Monte Carlo method");

  CoverageResult out;
  if (method == CoverageMethod::Exact) {
    try {
      out = integrate_outer(gamma, dist, method);
    } catch (const InstabilityError& e) {
      if (!opts_.fallback_to_upper) throw;
      const std::string msg = std::string(e.what()) + "; falling back to the upper bound";
      warn(msg);
      out = integrate_outer(gamma, dist, CoverageMethod::UpperBound);
      out.fell_back = true;
      out.warnings.insert(out.warnings.begin(), msg);
    }
  } else {
    out = integrate_outer(gamma, dist, method);
  }

  if (out.raw_value < -out.quad_error || out.raw_value > 1.0 + out.quad_error) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "coverage %.12g lies outside [0, 1] beyond its error bound %.3g; clamped",
                  out.raw_value, out.quad_error);
    warn(buf);
    out.warnings.emplace_back(buf);
  }
  out.value = std::clamp(out.raw_value, 0.0, 1.0);
  return out;
}

UeCountDistribution CoverageEngine::distribution_for(SchedulerKind scheduler, CoverageMethod method) const {
  if (scheduler == SchedulerKind::RoundRobin) return UeCountDistribution::point_mass_one();
  // The bound costs one Laplace evaluation per r whatever the support size,
  // so the cap only guards the exact sum.
  return method == CoverageMethod::Exact ? active_ue_count_distribution(cfg_)
                                         : active_ue_count_distribution(cfg_, INT_MAX);
}

CoverageResult CoverageEngine::coverage(double gamma, SchedulerKind scheduler, CoverageMethod method) const {
  return coverage_with(gamma, distribution_for(scheduler, method), method);
}

QuadResult CoverageEngine::serving_normalization() const {
  QuadResult total;
  const double scale = 1.0 / std::sqrt(cfg_.lambda);
  QuadOptions opts{1e-12, 1e-12, 2000};
  for (const auto& p : model_.pieces()) {
    for (Branch b : {Branch::LoS, Branch::NLoS}) {
      auto f = [&](double r) { return serving_pdf(r, b); };
      total += std::isinf(p.d_hi) ? integrate_to_infinity(f, p.d_lo, std::max(p.d_lo, scale), opts)
                                  : integrate(f, p.d_lo, p.d_hi, opts);
    }
  }
  return total;
}

double serving_distance_pdf_los(double r_km, const NetworkConfig& cfg, const PathLossModel& model) {
  return CoverageEngine(cfg, model).serving_pdf(r_km, Branch::LoS);
}

double serving_distance_pdf_nlos(double r_km, const NetworkConfig& cfg, const PathLossModel& model) {
  return CoverageEngine(cfg, model).serving_pdf(r_km, Branch::NLoS);
}

double laplace_interference_los(double s, double r_km, const NetworkConfig& cfg, const PathLossModel& model) {
  return CoverageEngine(cfg, model).laplace(s, r_km, Branch::LoS);
}

double laplace_interference_nlos(double s, double r_km, const NetworkConfig& cfg, const PathLossModel& model) {
  return CoverageEngine(cfg, model).laplace(s, r_km, Branch::NLoS);
}

double conditional_coverage_exact(double r_km, Branch b, const NetworkConfig& cfg, const PathLossModel& model,
                                  const UeCountDistribution& dist, double gamma) {
  return CoverageEngine(cfg, model).conditional_exact(r_km, b, gamma, dist);
}

double conditional_coverage_upper(double r_km, Branch b, const NetworkConfig& cfg, const PathLossModel& model,
                                  const UeCountDistribution& dist, double gamma) {
  return CoverageEngine(cfg, model).conditional_upper(r_km, b, gamma, dist);
}

CoverageResult coverage_probability(const CoverageQuery& query, const CoverageOptions& opts) {
  return CoverageEngine(query.cfg, query.model, opts).coverage(query.gamma, query.scheduler, query.method);
}

}  // namespace udn
