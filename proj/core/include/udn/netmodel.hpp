#pragma once

#include <cstddef>
#include <vector>

#include "udn/rng.hpp"
#include "udn/units.hpp"

namespace udn {

/// Scalar model parameters. Densities are per km², powers in watts.
struct NetworkConfig {
  double lambda = 1000.0;  // BS density
  double rho = 300.0;      // active UE density
  double q = 4.05;         // shape of the cell-area distribution
  double tx_power = dbm_to_watts(24.0);
  double noise_power = dbm_to_watts(-95.0);
  double epsilon = 1e-3;   // tail mass allowed beyond K̃max
  int kmax_cap = 10000;    // largest K̃max the exact method will accept

  /// Throws ConfigError if any field is out of range.
  void validate() const;
};

/// Density of BSs that have at least one UE: λ[1 - (1 + ρ/(qλ))^-q].
double active_bs_density(const NetworkConfig& cfg);

/// Gamma(q, qλ) density of the area of a typical cell, x in km².
double cell_area_pdf(double x_km2, const NetworkConfig& cfg);

/// Negative-binomial probability that a BS has k UEs (k >= 0).
double ue_count_pmf(int k, const NetworkConfig& cfg);

/// UEs per active BS: the negative binomial conditioned on k >= 1, stored up to
/// the first K̃max whose CDF reaches 1 - epsilon.
class UeCountDistribution {
 public:
  /// pmf(k) for k = 1..kmax. Returns 0 outside the stored range.
  double pmf(int k) const;
  double cdf(int k) const;
  int kmax() const { return static_cast<int>(pmf_.size()); }
  double mass_deficit() const { return mass_deficit_; }
  double mean() const;
  const std::vector<double>& values() const { return pmf_; }

  /// Draws from the untruncated conditional law; the tail beyond kmax is
  /// generated on demand, so sampling is exact even though storage is finite.
  int sample(Rng& rng) const;

  /// Every active BS serves exactly one UE. Turns the PF machinery into RR.
  static UeCountDistribution point_mass_one();

 private:
  friend UeCountDistribution active_ue_count_distribution(const NetworkConfig&, int);

  std::vector<double> pmf_;
  double mass_deficit_ = 0.0;
  double q_ = 1.0;
  double log_p_ = 0.0;  // log of the per-UE "success" parameter ρ/(ρ+qλ)
  double scale_ = 1.0;  // 1/(1 - f_K(0))
};

/// Distribution of UEs per active BS, truncated with cfg.epsilon.
/// Throws InfeasibleRegimeError if K̃max exceeds `kmax_cap`.
UeCountDistribution active_ue_count_distribution(const NetworkConfig& cfg, int kmax_cap);

/// Same, using cfg.kmax_cap.
inline UeCountDistribution active_ue_count_distribution(const NetworkConfig& cfg) {
  return active_ue_count_distribution(cfg, cfg.kmax_cap);
}

}  // namespace udn
