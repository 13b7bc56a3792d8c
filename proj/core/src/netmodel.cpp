#include "udn/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "udn/errors.hpp"

namespace udn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

double log_success(const NetworkConfig& cfg) {
  return std::log(cfg.rho) - std::log(cfg.rho + cfg.q * cfg.lambda);
}

double log_failure(const NetworkConfig& cfg) {
  const double ql = cfg.q * cfg.lambda;
  return std::log(ql) - std::log(cfg.rho + ql);
}

double log_nb_pmf(int k, double q, double log_p, double log_1mp) {
  return std::lgamma(k + q) - std::lgamma(k + 1.0) - std::lgamma(q) + k * log_p + q * log_1mp;
}

}  // namespace

void NetworkConfig::validate() const {
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be a positive finite density");
  require(std::isfinite(rho) && rho > 0.0, "rho must be a positive finite density");
  require(std::isfinite(q) && q > 0.0, "q must be positive");
  require(std::isfinite(tx_power) && tx_power > 0.0, "tx_power must be positive");
  require(std::isfinite(noise_power) && noise_power > 0.0, "noise_power must be positive");
  require(epsilon > 0.0 && epsilon <= 0.1, "epsilon must lie in (0, 0.1]");
  require(kmax_cap >= 1, "kmax_cap must be at least 1");
}

double active_bs_density(const NetworkConfig& cfg) {
  cfg.validate();
  // 1 - (1 + x)^-q, written to keep precision when x is tiny (sparse UEs).
  const double x = cfg.rho / (cfg.q * cfg.lambda);
  return cfg.lambda * -std::expm1(-cfg.q * std::log1p(x));
}

double cell_area_pdf(double x_km2, const NetworkConfig& cfg) {
  cfg.validate();
  if (!(x_km2 > 0.0)) throw DomainError("cell area must be positive");
  const double rate = cfg.q * cfg.lambda;
  const double log_pdf = cfg.q * std::log(rate) + (cfg.q - 1.0) * std::log(x_km2) - rate * x_km2 - std::lgamma(cfg.q);
  return std::exp(log_pdf);
}

double ue_count_pmf(int k, const NetworkConfig& cfg) {
  cfg.validate();
  if (k < 0) throw DomainError("UE count must be non-negative");
  return std::exp(log_nb_pmf(k, cfg.q, log_success(cfg), log_failure(cfg)));
}

double UeCountDistribution::pmf(int k) const {
  if (k < 1 || k > kmax()) return 0.0;
  return pmf_[static_cast<std::size_t>(k - 1)];
}

double UeCountDistribution::cdf(int k) const {
  double sum = 0.0;
  for (int j = 1; j <= std::min(k, kmax()); ++j) sum += pmf_[static_cast<std::size_t>(j - 1)];
  return sum;
}

double UeCountDistribution::mean() const {
  double m = 0.0;
  for (int k = 1; k <= kmax(); ++k) m += k * pmf_[static_cast<std::size_t>(k - 1)];
  return m;
}

int UeCountDistribution::sample(Rng& rng) const {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (int k = 1; k <= kmax(); ++k) {
    u -= pmf_[static_cast<std::size_t>(k - 1)];
    if (u < 0.0) return k;
  }
  if (mass_deficit_ == 0.0) return kmax();
  // Walk the tail with the ratio f(k+1)/f(k) = p (k+q)/(k+1).
  const double p = std::exp(log_p_);
  int k = kmax();
  double f = pmf_.back();
  for (;;) {
    f *= p * (k + q_) / (k + 1.0);
    ++k;
    u -= f;
    if (u < 0.0 || f == 0.0) return k;
  }
}

UeCountDistribution UeCountDistribution::point_mass_one() {
  UeCountDistribution d;
  d.pmf_ = {1.0};
  return d;
}

UeCountDistribution active_ue_count_distribution(const NetworkConfig& cfg, int kmax_cap) {
  cfg.validate();
  UeCountDistribution d;
  d.q_ = cfg.q;
  d.log_p_ = log_success(cfg);
  const double log_1mp = log_failure(cfg);
  const double one_minus_f0 = -std::expm1(cfg.q * log_1mp);
  d.scale_ = 1.0 / one_minus_f0;

  const double target = 1.0 - cfg.epsilon;
  double cum = 0.0;
  double comp = 0.0;  // Neumaier compensation
  for (int k = 1;; ++k) {
    if (k > kmax_cap) {
      throw InfeasibleRegimeError("UE-count support exceeds the cap of " + std::to_string(kmax_cap) +
                                      " terms at lambda=" + std::to_string(cfg.lambda) +
                                      "; use the upper-bound method for this density",
                                  k);
    }
    const double v = std::exp(log_nb_pmf(k, cfg.q, d.log_p_, log_1mp)) * d.scale_;
    d.pmf_.push_back(v);
    const double t = cum + v;
    comp += std::abs(cum) >= std::abs(v) ? (cum - t) + v : (v - t) + cum;
    cum = t;
    if (cum + comp >= target) break;
  }
  d.mass_deficit_ = std::max(0.0, 1.0 - (cum + comp));
  return d;
}

}  // namespace udn
