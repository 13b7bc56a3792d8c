#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "udn/fading.hpp"
#include "udn/netmodel.hpp"
#include "udn/pathloss.hpp"
#include "udn/rng.hpp"

namespace udn {

enum class SimMode {
  ModelFaithful,  // samples the random structure the analytic engine integrates
  FullDrop,       // BS and UE fields, per-UE association, idle BSs
};

const char* to_string(SimMode m);

struct SimConfig {
  NetworkConfig base{};
  PathLossModel model = make_3gpp_case();
  SchedulerKind scheduler = SchedulerKind::ProportionalFair;
  FadingKind fading = FadingKind::Rayleigh;
  SimMode mode = SimMode::ModelFaithful;
  double sim_radius_km = 0.0;  // 0: default_sim_radius()
  long n_drops = 10000;
  std::uint64_t master_seed = 1;
  unsigned workers = 0;  // 0: one per hardware thread

  // Model-faithful overrides for degenerate cross-checks.
  std::optional<double> interferer_density;  // replaces λ̃
  std::optional<int> fixed_k;                // replaces the UE-count draw

  // Full-drop only: also gather the active-BS fraction and UE-per-BS counts
  // for BSs in the inner half of the disc. Costly at low densities.
  bool collect_full_stats = false;
};

struct DropOutcome {
  double serving_distance_km = 0.0;
  Branch serving_branch = Branch::NLoS;
  int k_served = 1;
  double gain = 0.0;
  double i_agg = 0.0;  // watts
  double sinr = 0.0;
  bool served = true;  // false if the disc held no BS
};

/// One drop evaluated under both schedulers on the same realization: RR uses
/// the typical UE's own fading draw, PF the best of the k̃ draws.
struct PairedDrop {
  DropOutcome rr;
  DropOutcome pf;
  // Full-drop statistics (empty unless requested).
  int inner_bs = 0;
  int inner_active = 0;
  std::vector<int> inner_ue_counts;
};

struct RadiusChoice {
  double radius_km;
  double d_median_km;  // median serving distance
  double d99_km;       // 99th-percentile serving distance
  double r_far_km;     // interference beyond this is below 1e-3 of typical noise plus interference
};

/// Disc radius: max(5 d99, r_far). See RadiusChoice.
RadiusChoice default_sim_radius(const NetworkConfig& cfg, const PathLossModel& model);

PairedDrop run_drop_pair(const SimConfig& cfg, long drop_index);
DropOutcome run_drop_model_faithful(const SimConfig& cfg, long drop_index);
DropOutcome run_drop_full(const SimConfig& cfg, long drop_index);

struct SimRun {
  std::vector<PairedDrop> drops;
  double radius_km = 0.0;
  long boundary_hits = 0;  // drops whose serving distance exceeded radius/5

  const DropOutcome& outcome(long i, SchedulerKind s) const {
    return s == SchedulerKind::RoundRobin ? drops[static_cast<std::size_t>(i)].rr
                                          : drops[static_cast<std::size_t>(i)].pf;
  }
};

/// Runs cfg.n_drops drops in parallel. Results do not depend on cfg.workers.
SimRun simulate(const SimConfig& cfg);

struct Interval {
  double lo;
  double hi;
};

/// Wilson score interval for a binomial proportion (z = 1.96 by default).
Interval wilson_interval(long successes, long n, double z = 1.959963984540054);

struct CoverageEstimate {
  double gamma = 0.0;
  double p_hat = 0.0;
  Interval ci95{0.0, 0.0};
  long n = 0;
};

CoverageEstimate estimate_from_run(const SimRun& run, SchedulerKind s, double gamma);

/// Fraction of drops with SINR above gamma under cfg.scheduler. Needs n_drops >= 100.
CoverageEstimate estimate_coverage(const SimConfig& cfg, double gamma);

/// The same sample set scored against every threshold.
std::vector<CoverageEstimate> estimate_curve(const SimConfig& cfg, const std::vector<double>& gamma_grid);

/// Aggregate interference at the origin when the serving link has branch b at
/// distance r: active BSs of density λ̃ (or cfg.interferer_density) whose gain
/// is below the serving gain, each with a fresh fading draw. Used to check
/// interference transforms by simulation.
double sample_conditional_interference(const SimConfig& cfg, double r_km, Branch b, double radius_km, Rng& rng);

}  // namespace udn
