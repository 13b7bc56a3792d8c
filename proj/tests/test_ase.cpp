#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "udn/ase.hpp"
#include "udn/diagnostics.hpp"

namespace {

using namespace udn;

std::vector<CurvePoint> synthetic(double lo_db, double hi_db, double step_db) {
  std::vector<CurvePoint> pts;
  for (double db = lo_db; db <= hi_db + 1e-9; db += step_db) {
    const double g = std::pow(10.0, db / 10.0);
    pts.push_back({g, 1.0 / (1.0 + g)});
  }
  return pts;
}

TEST(AseFromCurve, MatchesClosedFormForAKnownCurve) {
  // p(γ) = 1/(1+γ): ∫_{γ0}^{Γ} p/(1+γ) dγ = 1/(1+γ0) - 1/(1+Γ).
  const auto pts = synthetic(-10.0, 60.0, 0.25);
  const double top = pts.back().gamma;
  for (double gamma0 : {1.0, 3.0, 0.5}) {
    const double lt = 200.0;
    const double want =
        lt / std::log(2.0) * (1.0 / (1.0 + gamma0) - 1.0 / (1.0 + top)) + lt * std::log2(1.0 + gamma0) / (1.0 + gamma0);
    EXPECT_NEAR(ase_from_curve(pts, lt, gamma0), want, 1e-5 * want) << gamma0;
  }
}

TEST(AseFromCurve, IgnoresSampleOrder) {
  auto pts = synthetic(-10.0, 30.0, 1.0);
  const double a = ase_from_curve(pts, 10.0, 1.0);
  std::reverse(pts.begin(), pts.end());
  EXPECT_DOUBLE_EQ(ase_from_curve(pts, 10.0, 1.0), a);
}

TEST(AseFromCurve, RejectsMalformedCurves) {
  auto pts = synthetic(-10.0, 30.0, 1.0);
  EXPECT_THROW(ase_from_curve({pts.begin(), pts.begin() + 3}, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(ase_from_curve(pts, 1.0, 1e5), std::invalid_argument);
  EXPECT_THROW(ase_from_curve(pts, 1.0, 0.0), std::invalid_argument);
  auto dup = pts;
  dup[1].gamma = dup[0].gamma;
  EXPECT_THROW(ase_from_curve(dup, 1.0, 1.0), std::invalid_argument);
  auto out = pts;
  out[2].p = 1.5;
  EXPECT_THROW(ase_from_curve(out, 1.0, 1.0), std::invalid_argument);
}

TEST(Ase, MatchesSimpsonOverCoverageEvaluations) {
  ScopedWarningSink quiet{WarningSink{}};
  AseQuery q;
  q.cfg.lambda = 100.0;
  q.scheduler = SchedulerKind::RoundRobin;
  const auto res = ase(q);
  const CoverageEngine eng(q.cfg, q.model);
  // ∫_{0 dB}^{∞} p(γ)/(1+γ) dγ in x = ln γ, up to the same 10^6 ceiling.
  auto f = [&](double x) {
    const double g = std::exp(x);
    return eng.coverage(g, q.scheduler, q.method).value * g / (1.0 + g);
  };
  const double integral = oracle::simpson(f, 0.0, std::log(1e6), 120);
  const double p0 = eng.coverage(1.0, q.scheduler, q.method).value;
  const double want = eng.lambda_tilde() * (integral / std::log(2.0) + p0);
  EXPECT_NEAR(res.value, want, std::max(res.error, 2e-3 * want));
  EXPECT_NEAR(res.lambda_tilde, eng.lambda_tilde(), 1e-12);
  EXPECT_FALSE(res.fell_back);
  ASSERT_GE(res.curve.size(), 4u);
  for (std::size_t i = 1; i < res.curve.size(); ++i) {
    EXPECT_GT(res.curve[i].gamma, res.curve[i - 1].gamma);
    EXPECT_LE(res.curve[i].p, res.curve[i - 1].p + 1e-9);
  }
}

TEST(Ase, CacheReturnsIdenticalResults) {
  ScopedWarningSink quiet{WarningSink{}};
  AseQuery q;
  q.cfg.lambda = 1000.0;
  q.scheduler = SchedulerKind::RoundRobin;
  CoverageCurveCache cache;
  const auto first = ase(q, {}, &cache);
  const auto filled = cache.size();
  EXPECT_GT(filled, 0u);
  const auto second = ase(q, {}, &cache);
  EXPECT_EQ(cache.size(), filled);
  EXPECT_EQ(first.value, second.value);
  const auto uncached = ase(q);
  EXPECT_EQ(first.value, uncached.value);
}

TEST(Ase, WorkerCountDoesNotChangeTheValue) {
  ScopedWarningSink quiet{WarningSink{}};
  AseQuery q;
  q.cfg.lambda = 1000.0;
  q.scheduler = SchedulerKind::RoundRobin;
  AseOptions one;
  one.workers = 1;
  AseOptions many;
  many.workers = 8;
  EXPECT_EQ(ase(q, one).value, ase(q, many).value);
}

TEST(Ase, RejectsNonPositiveMinimumSinr) {
  AseQuery q;
  q.gamma0 = 0.0;
  EXPECT_THROW(ase(q), std::invalid_argument);
}

}  // namespace
