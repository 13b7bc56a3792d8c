#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "udn/coverage.hpp"
#include "udn/diagnostics.hpp"
#include "udn/errors.hpp"
#include "udn/mcsim.hpp"

namespace {

using namespace udn;

class Sim : public ::testing::Test {
 protected:
  ScopedWarningSink sink_{WarningSink{}};
};

SimConfig config(double lambda, SimMode mode, long drops, std::uint64_t seed = 1) {
  SimConfig sc;
  sc.base.lambda = lambda;
  sc.mode = mode;
  sc.n_drops = drops;
  sc.master_seed = seed;
  return sc;
}

double sigma(double p, long n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

bool same(const DropOutcome& a, const DropOutcome& b) {
  return a.serving_distance_km == b.serving_distance_km && a.serving_branch == b.serving_branch &&
         a.k_served == b.k_served && a.gain == b.gain && a.i_agg == b.i_agg && a.sinr == b.sinr && a.served == b.served;
}

TEST(Wilson, MatchesTheScoreFormula) {
  const double z = 1.959963984540054;
  for (auto [x, n] : {std::pair{0L, 10L}, {5L, 10L}, {97L, 100L}, {1234L, 20000L}}) {
    const double p = static_cast<double>(x) / n;
    const double denom = 1.0 + z * z / n;
    const double centre = (p + z * z / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1 - p) / n + z * z / (4.0 * n * n));
    const auto ci = wilson_interval(x, n);
    EXPECT_NEAR(ci.lo, centre - half, 1e-14) << x << "/" << n;
    EXPECT_NEAR(ci.hi, centre + half, 1e-14) << x << "/" << n;
  }
  EXPECT_EQ(wilson_interval(0, 10).lo, 0.0);
  EXPECT_NEAR(wilson_interval(0, 10).hi, z * z / (10.0 + z * z), 1e-14);
}

TEST_F(Sim, DropsAreReproducibleAndIndependentOfWorkers) {
  for (SimMode mode : {SimMode::ModelFaithful, SimMode::FullDrop}) {
    auto sc = config(300.0, mode, 64, 9);
    sc.collect_full_stats = mode == SimMode::FullDrop;
    sc.workers = 1;
    const auto serial = simulate(sc);
    sc.workers = 6;
    const auto parallel = simulate(sc);
    ASSERT_EQ(serial.drops.size(), parallel.drops.size());
    for (long i = 0; i < sc.n_drops; ++i) {
      const auto& a = serial.drops[static_cast<std::size_t>(i)];
      const auto& b = parallel.drops[static_cast<std::size_t>(i)];
      EXPECT_TRUE(same(a.rr, b.rr) && same(a.pf, b.pf)) << to_string(mode) << " drop " << i;
      EXPECT_EQ(a.inner_ue_counts, b.inner_ue_counts);
      const auto single = run_drop_pair(sc, i);
      EXPECT_TRUE(same(single.pf, a.pf)) << to_string(mode) << " drop " << i;
    }
    EXPECT_TRUE(same(mode == SimMode::FullDrop ? run_drop_full(sc, 5) : run_drop_model_faithful(sc, 5),
                     sc.scheduler == SchedulerKind::ProportionalFair ? serial.drops[5].pf : serial.drops[5].rr));
  }
}

TEST_F(Sim, SeedsChangeTheRealization) {
  const auto a = simulate(config(1000.0, SimMode::ModelFaithful, 50, 1));
  const auto b = simulate(config(1000.0, SimMode::ModelFaithful, 50, 2));
  int differ = 0;
  for (std::size_t i = 0; i < a.drops.size(); ++i) differ += a.drops[i].rr.sinr != b.drops[i].rr.sinr;
  EXPECT_GT(differ, 45);
}

TEST_F(Sim, SinrIsSignalOverInterferencePlusNoise) {
  for (SimMode mode : {SimMode::ModelFaithful, SimMode::FullDrop}) {
    const auto sc = config(1000.0, mode, 200);
    const auto run = simulate(sc);
    for (const auto& d : run.drops) {
      for (const auto* o : {&d.rr, &d.pf}) {
        const double signal = sc.base.tx_power * sc.model.gain(o->serving_distance_km, o->serving_branch) * o->gain;
        EXPECT_DOUBLE_EQ(o->sinr, signal / (o->i_agg + sc.base.noise_power));
      }
      // Both schedulers see the same realization; PF picks the best draw.
      EXPECT_EQ(d.rr.serving_distance_km, d.pf.serving_distance_km);
      EXPECT_GE(d.pf.sinr, d.rr.sinr);
    }
  }
}

// Single-slope α = 4 network with every BS active and negligible noise:
// P[SINR > 1] = 1/(1 + π/4).
TEST_F(Sim, ModelFaithfulMatchesClosedFormInDegenerateCase) {
  auto sc = config(50.0, SimMode::ModelFaithful, 20000, 3);
  sc.model = make_single_slope_nlos(1e-14, 4.0);
  sc.base.noise_power = 1e-40;
  sc.interferer_density = sc.base.lambda;
  sc.fixed_k = 1;
  sc.scheduler = SchedulerKind::RoundRobin;
  const auto est = estimate_coverage(sc, 1.0);
  const double closed = 1.0 / (1.0 + std::numbers::pi / 4.0);
  EXPECT_NEAR(est.p_hat, closed, 4.0 * sigma(closed, est.n));
}

TEST_F(Sim, ModelFaithfulMatchesAnalyticCoverage) {
  const double lambda = 1000.0;
  const CoverageEngine eng(config(lambda, SimMode::ModelFaithful, 1).base, make_3gpp_case());
  const auto run = simulate(config(lambda, SimMode::ModelFaithful, 20000, 4));
  const auto dist = eng.distribution_for(SchedulerKind::ProportionalFair, CoverageMethod::Exact);
  for (SchedulerKind s : {SchedulerKind::RoundRobin, SchedulerKind::ProportionalFair}) {
    const double exact = eng.coverage(1.0, s, CoverageMethod::Exact).value;
    const auto est = estimate_from_run(run, s, 1.0);
    EXPECT_NEAR(est.p_hat, exact, 4.0 * sigma(exact, est.n) + dist.mass_deficit()) << to_string(s);
  }
}

TEST_F(Sim, ModelFaithfulServingBranchFrequencyMatchesDensity) {
  const double lambda = 100.0;
  const auto sc = config(lambda, SimMode::ModelFaithful, 20000, 5);
  const CoverageEngine eng(sc.base, sc.model);
  const auto los = integrate([&](double r) { return eng.serving_pdf(r, Branch::LoS); }, 1e-9, 2.0,
                             QuadOptions{1e-10, 1e-10, 2000});
  const auto run = simulate(sc);
  long hits = 0;
  for (const auto& d : run.drops) hits += d.rr.serving_branch == Branch::LoS;
  EXPECT_NEAR(static_cast<double>(hits) / sc.n_drops, los.value, 4.0 * sigma(los.value, sc.n_drops));
}

TEST_F(Sim, FullDropRoundRobinTracksAnalyticValue) {
  const double lambda = 1000.0;
  const auto sc = config(lambda, SimMode::FullDrop, 20000, 6);
  const CoverageEngine eng(sc.base, sc.model);
  const double analytic = eng.coverage(1.0, SchedulerKind::RoundRobin, CoverageMethod::Exact).value;
  const auto run = simulate(sc);
  EXPECT_NEAR(estimate_from_run(run, SchedulerKind::RoundRobin, 1.0).p_hat, analytic, 0.03);
}

TEST_F(Sim, FullDropActiveFractionAndUeCounts) {
  for (double lambda : {100.0, 1000.0}) {
    auto sc = config(lambda, SimMode::FullDrop, lambda < 500 ? 200 : 1000, 7);
    sc.collect_full_stats = true;
    const auto run = simulate(sc);
    long bs = 0, active = 0;
    for (const auto& d : run.drops) {
      bs += d.inner_bs;
      active += d.inner_active;
      for (int n : d.inner_ue_counts) EXPECT_GE(n, 0);
    }
    ASSERT_GT(bs, 1000);
    // The cell-area law behind λ̃/λ is an approximation, so this is a band, not a CI.
    EXPECT_NEAR(static_cast<double>(active) / bs, active_bs_density(sc.base) / lambda, 0.02) << lambda;
  }
}

TEST_F(Sim, DenseFullDropSchedulersOverlap) {
  const auto run = simulate(config(1e4, SimMode::FullDrop, 2000, 8));
  const auto pf = estimate_from_run(run, SchedulerKind::ProportionalFair, 1.0);
  const auto rr = estimate_from_run(run, SchedulerKind::RoundRobin, 1.0);
  EXPECT_LE(pf.ci95.lo, rr.p_hat);
  EXPECT_GE(pf.ci95.hi, rr.p_hat);
  EXPECT_LE(rr.ci95.lo, pf.p_hat);
  EXPECT_GE(rr.ci95.hi, pf.p_hat);
}

TEST_F(Sim, CurveIsPointwiseEstimateAndNonIncreasing) {
  const auto sc = config(1000.0, SimMode::ModelFaithful, 2000, 10);
  const std::vector<double> grid{0.1, 0.5, 1.0, 4.0, 20.0};
  const auto curve = estimate_curve(sc, grid);
  ASSERT_EQ(curve.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto single = estimate_coverage(sc, grid[i]);
    EXPECT_EQ(curve[i].p_hat, single.p_hat);
    EXPECT_LE(curve[i].ci95.lo, curve[i].p_hat);
    EXPECT_GE(curve[i].ci95.hi, curve[i].p_hat);
    if (i > 0) {
      EXPECT_LE(curve[i].p_hat, curve[i - 1].p_hat);
    }
  }
}

TEST_F(Sim, DefaultRadiusCoversTheServingTail) {
  for (double lambda : {1.0, 100.0, 1e4}) {
    NetworkConfig cfg;
    cfg.lambda = lambda;
    const auto rc = default_sim_radius(cfg, make_3gpp_case());
    EXPECT_GT(rc.d99_km, rc.d_median_km);
    EXPECT_GE(rc.radius_km, 5.0 * rc.d99_km * (1 - 1e-12));
    EXPECT_GE(rc.radius_km, rc.r_far_km * (1 - 1e-12));
  }
}

TEST(SimWarnings, UndersizedDiscIsReported) {
  std::vector<std::string> messages;
  ScopedWarningSink sink([&](std::string_view m) { messages.emplace_back(m); });
  auto sc = config(10.0, SimMode::ModelFaithful, 500, 11);
  sc.sim_radius_km = 0.1;
  const auto run = simulate(sc);
  EXPECT_GT(run.boundary_hits, 10);
  bool found = false;
  for (const auto& m : messages) found = found || m.find("disc radius") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST_F(Sim, RejectsBadConfigurations) {
  auto sc = config(100.0, SimMode::ModelFaithful, 0);
  EXPECT_THROW(simulate(sc), ConfigError);
  sc.n_drops = 50;
  EXPECT_THROW(estimate_coverage(sc, 1.0), ConfigError);
  sc.n_drops = 200;
  sc.fixed_k = 0;
  EXPECT_THROW(simulate(sc), ConfigError);
  sc.fixed_k.reset();
  sc.interferer_density = -1.0;
  EXPECT_THROW(simulate(sc), ConfigError);
}

}  // namespace
