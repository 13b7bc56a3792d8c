#include "udn/fading.hpp"

#include <cmath>
#include <random>

#include "udn/errors.hpp"
#include "udn/units.hpp"

namespace udn {

const char* to_string(SchedulerKind s) { return s == SchedulerKind::RoundRobin ? "rr" : "pf"; }

const char* to_string(FadingKind f) { return f == FadingKind::Rayleigh ? "rayleigh" : "rician"; }

double pf_gain_ccdf(double y, int k) {
  if (!(y >= 0.0)) throw DomainError("gain must be non-negative");
  if (k < 1) throw DomainError("UE count must be at least 1");
  // 1 - (1 - e^-y)^k without cancellation for large y.
  return -std::expm1(k * std::log1p(-std::exp(-y)));
}

PfDraw sample_pf_gain(int k, Rng& rng) {
  if (k < 1) throw DomainError("UE count must be at least 1");
  std::exponential_distribution<double> exp1(1.0);
  PfDraw best{exp1(rng), 0};
  for (int i = 1; i < k; ++i) {
    const double g = exp1(rng);
    if (g > best.gain) best = {g, i};
  }
  return best;
}

double rician_k_factor_db(double r_m) { return 13.0 - 0.03 * r_m; }

double sample_rayleigh(Rng& rng) { return std::exponential_distribution<double>(1.0)(rng); }

double sample_rician(double k_linear, Rng& rng) {
  const double los = std::sqrt(k_linear / (k_linear + 1.0));
  const double sigma = std::sqrt(0.5 / (k_linear + 1.0));  // per real dimension
  std::normal_distribution<double> n01(0.0, 1.0);
  const double re = los + sigma * n01(rng);
  const double im = sigma * n01(rng);
  return re * re + im * im;
}

double sample_fading(FadingKind kind, double r_m, Rng& rng) {
  if (kind == FadingKind::Rayleigh) return sample_rayleigh(rng);
  return sample_rician(db_to_linear(rician_k_factor_db(r_m)), rng);
}

}  // namespace udn
