#pragma once

#include <string>
#include <vector>

#include "udn/fading.hpp"
#include "udn/netmodel.hpp"
#include "udn/pathloss.hpp"
#include "udn/quadrature.hpp"

namespace udn {

enum class CoverageMethod { Exact, UpperBound, MonteCarlo };

const char* to_string(CoverageMethod m);

struct CoverageOptions {
  // Integrals inside the Laplace exponent and the serving-distance density.
  QuadOptions inner{0.0, 1e-12, 2000};
  // Absolute accuracy required of each interference exponent 2πλ̃∫...; sets the
  // inner absolute tolerance.
  double exponent_abs_tol = 1e-13;
  // Integral over the serving distance.
  QuadOptions outer{1e-7, 1e-9, 2000};
  // The alternating sum is rejected when its largest term exceeds the result
  // by this factor.
  double instability_ratio = 1e8;
  // On instability, recompute with the upper bound instead of throwing.
  bool fallback_to_upper = true;
  // Flips the sign of the noise exponent. Used only to check that the
  // validation suite notices a broken formula.
  bool inject_delta_sign_error = false;
};

struct CoverageQuery {
  NetworkConfig cfg{};
  PathLossModel model = make_3gpp_case();
  double gamma = 1.0;  // linear SINR threshold
  SchedulerKind scheduler = SchedulerKind::ProportionalFair;
  CoverageMethod method = CoverageMethod::Exact;
};

/// Contribution of one path-loss piece: serving link LoS and NLoS.
struct PieceTerms {
  double los = 0.0;
  double nlos = 0.0;
};

struct CoverageResult {
  double value = 0.0;      // clamped to [0, 1]
  double raw_value = 0.0;  // before clamping
  CoverageMethod method = CoverageMethod::Exact;
  double quad_error = 0.0;
  std::vector<PieceTerms> terms;
  bool fell_back = false;
  int kmax = 1;
  long evaluations = 0;
  std::vector<std::string> warnings;
};

/// Analytic coverage for one network configuration and path-loss model.
/// Distances are in km. Serving-distance densities use the full BS density;
/// interference uses the active density. Const member functions are
/// reentrant.
class CoverageEngine {
 public:
  CoverageEngine(NetworkConfig cfg, PathLossModel model, CoverageOptions opts = {});

  const NetworkConfig& config() const { return cfg_; }
  const PathLossModel& model() const { return model_; }
  const CoverageOptions& options() const { return opts_; }
  double lambda_tilde() const { return lambda_tilde_; }

  /// ∫_0^x Pr^L(u) u du.
  double los_moment(double x_km) const;
  /// ∫_0^x (1 - Pr^L(u)) u du.
  double nlos_moment(double x_km) const { return 0.5 * x_km * x_km - los_moment(x_km); }

  /// Density of "the strongest BS is at distance r and is of branch b".
  double serving_pdf(double r_km, Branch b) const;

  /// E[exp(-s I)] for a serving link of branch b at distance r.
  double laplace(double s, double r_km, Branch b) const;
  /// -log of laplace(), returned directly to avoid underflow.
  double laplace_exponent(double s, double r_km, Branch b) const;

  /// exp(-γ P_N / (P ζ_b(r))).
  double noise_factor(double gamma, double r_km, Branch b) const;

  /// P[SINR > γ | r, b] averaged over k̃ with the alternating binomial sum.
  /// Throws InstabilityError when cancellation makes the sum unreliable.
  double conditional_exact(double r_km, Branch b, double gamma, const UeCountDistribution& dist) const;

  /// Jensen upper bound of conditional_exact.
  double conditional_upper(double r_km, Branch b, double gamma, const UeCountDistribution& dist) const;

  /// ∑ over branches and pieces of ∫ conditional × serving_pdf dr.
  CoverageResult coverage(double gamma, SchedulerKind scheduler, CoverageMethod method) const;

  /// Same, with an explicit UE-count distribution (PF machinery).
  CoverageResult coverage_with(double gamma, const UeCountDistribution& dist, CoverageMethod method) const;

  /// ∑ over branches and pieces of ∫ serving_pdf dr. Equals 1 for a valid model.
  QuadResult serving_normalization() const;

  /// UE-count distribution used for the scheduler and method.
  UeCountDistribution distribution_for(SchedulerKind scheduler, CoverageMethod method) const;

 private:
  double piece_tail_integral(double s, double lower, Branch interferer) const;
  CoverageResult integrate_outer(double gamma, const UeCountDistribution& dist, CoverageMethod method) const;

  NetworkConfig cfg_;
  PathLossModel model_;
  CoverageOptions opts_;
  double lambda_tilde_;
  QuadOptions inner_;
};

// Free-function forms.

double serving_distance_pdf_los(double r_km, const NetworkConfig& cfg, const PathLossModel& model);
double serving_distance_pdf_nlos(double r_km, const NetworkConfig& cfg, const PathLossModel& model);
double laplace_interference_los(double s, double r_km, const NetworkConfig& cfg, const PathLossModel& model);
double laplace_interference_nlos(double s, double r_km, const NetworkConfig& cfg, const PathLossModel& model);
double conditional_coverage_exact(double r_km, Branch b, const NetworkConfig& cfg, const PathLossModel& model,
                                  const UeCountDistribution& dist, double gamma);
double conditional_coverage_upper(double r_km, Branch b, const NetworkConfig& cfg, const PathLossModel& model,
                                  const UeCountDistribution& dist, double gamma);
CoverageResult coverage_probability(const CoverageQuery& query, const CoverageOptions& opts = {});

}  // namespace udn
