#pragma once

#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "udn/coverage.hpp"

namespace udn {

struct CurvePoint {
  double gamma;  // linear
  double p;
};

struct AseQuery {
  NetworkConfig cfg{};
  PathLossModel model = make_3gpp_case();
  SchedulerKind scheduler = SchedulerKind::ProportionalFair;
  CoverageMethod method = CoverageMethod::Exact;
  double gamma0 = 1.0;  // minimum working SINR, linear
};

struct AseOptions {
  double initial_step_db = 2.0;
  double min_step_db = 0.125;
  // Intervals whose coverage drop exceeds this are bisected.
  double refine_dp = 0.02;
  // The threshold grid stops once coverage falls below p_floor or γ exceeds gamma_max.
  double p_floor = 1e-4;
  double gamma_max = 1e6;
  unsigned workers = 0;  // 0: one per hardware thread
  CoverageOptions coverage{};
};

struct AseResult {
  double value = 0.0;  // bps/Hz/km²
  double error = 0.0;  // interpolation, truncation and quadrature, combined
  double lambda_tilde = 0.0;
  std::vector<CurvePoint> curve;
  bool fell_back = false;  // some point used the upper bound instead of the exact sum
  std::vector<std::string> warnings;
};

/// Memoizes coverage values by (network parameters, scheduler, method, γ).
/// One cache must only be shared between queries on the same path-loss model.
/// Thread-safe; concurrent inserts of the same key store identical values.
class CoverageCurveCache {
 public:
  using Key = std::tuple<double, double, double, double, double, double, int, int, double>;

  static Key key(const NetworkConfig& cfg, SchedulerKind s, CoverageMethod m, double gamma);

  bool lookup(const Key& k, CoverageResult& out) const;
  void store(const Key& k, const CoverageResult& r);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<Key, CoverageResult> entries_;
};

/// λ̃/ln2 ∫_{γ0}^{∞} p(γ)/(1+γ) dγ + λ̃ log2(1+γ0) p(γ0), with p sampled on an
/// adaptive dB grid and interpolated monotonically.
AseResult ase(const AseQuery& query, const AseOptions& opts = {}, CoverageCurveCache* cache = nullptr);

/// Same formula applied to a given coverage curve (sorted internally). The
/// integral stops at the largest sampled γ. Needs at least four samples with
/// distinct γ, p in [0, 1] and γ0 inside the sampled range.
double ase_from_curve(std::vector<CurvePoint> samples, double lambda_tilde, double gamma0);

}  // namespace udn
