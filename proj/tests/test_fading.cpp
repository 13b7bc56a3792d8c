#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "udn/errors.hpp"
#include "udn/fading.hpp"
#include "udn/units.hpp"

namespace {

using namespace udn;

double harmonic(int k) {
  double h = 0.0;
  for (int i = 1; i <= k; ++i) h += 1.0 / i;
  return h;
}

TEST(PfGain, SingleUeIsExponential) {
  for (double y : {0.0, 0.3, 1.0, 7.0, 40.0}) EXPECT_NEAR(pf_gain_ccdf(y, 1), std::exp(-y), 1e-15 * (1 + std::exp(-y)));
}

TEST(PfGain, CcdfMatchesComplementOfPower) {
  for (int k : {2, 5, 30})
    for (double y : {0.1, 1.0, 4.0}) EXPECT_NEAR(pf_gain_ccdf(y, k), 1.0 - std::pow(1.0 - std::exp(-y), k), 1e-13);
  // Far tail: 1 - (1-e^-y)^k ≈ k e^-y where the direct form would round to 0.
  EXPECT_NEAR(pf_gain_ccdf(50.0, 3) / (3.0 * std::exp(-50.0)), 1.0, 1e-12);
}

TEST(PfGain, CcdfIntegratesToHarmonicNumber) {
  for (int k : {1, 2, 7, 40}) {
    const double mean = oracle::simpson([k](double y) { return pf_gain_ccdf(y, k); }, 0.0, 60.0, 60000);
    EXPECT_NEAR(mean, harmonic(k), 1e-9) << k;
  }
}

TEST(PfGain, SampledMaximumHasHarmonicMeanAndMatchingTail) {
  for (int k : {1, 4, 25}) {
    Rng rng(stream_seed(11, static_cast<std::uint64_t>(k)));
    std::vector<double> xs(100000);
    long above = 0;
    const double y = std::log(static_cast<double>(k)) + 1.0;
    for (auto& x : xs) {
      const auto d = sample_pf_gain(k, rng);
      ASSERT_GE(d.index, 0);
      ASSERT_LT(d.index, k);
      x = d.gain;
      above += x > y;
    }
    const auto m = oracle::moments(xs);
    EXPECT_NEAR(m.mean, harmonic(k), 4.0 * m.se) << k;
    const double p = pf_gain_ccdf(y, k);
    const double se = std::sqrt(p * (1 - p) / xs.size());
    EXPECT_NEAR(static_cast<double>(above) / xs.size(), p, 4.0 * se) << k;
  }
}

TEST(PfGain, RejectsBadArguments) {
  EXPECT_THROW(pf_gain_ccdf(-1.0, 2), DomainError);
  EXPECT_THROW(pf_gain_ccdf(1.0, 0), DomainError);
  Rng rng(1);
  EXPECT_THROW(sample_pf_gain(0, rng), DomainError);
}

TEST(Rician, KFactorFallsLinearlyWithDistance) {
  EXPECT_DOUBLE_EQ(rician_k_factor_db(0.0), 13.0);
  EXPECT_DOUBLE_EQ(rician_k_factor_db(100.0), 10.0);
  EXPECT_DOUBLE_EQ(rician_k_factor_db(1000.0), -17.0);
}

TEST(Rician, UnitMeanWithKnownVariance) {
  // Power gain of a unit-mean Rician channel has variance (1 + 2K)/(1 + K)^2.
  for (double k : {0.0, 1.0, 20.0}) {
    Rng rng(stream_seed(3, static_cast<std::uint64_t>(k * 10)));
    std::vector<double> xs(200000);
    for (auto& x : xs) x = sample_rician(k, rng);
    const auto m = oracle::moments(xs);
    EXPECT_NEAR(m.mean, 1.0, 4.0 * m.se) << k;
    const double var = m.se * m.se * static_cast<double>(xs.size());
    EXPECT_NEAR(var, (1.0 + 2.0 * k) / ((1.0 + k) * (1.0 + k)), 0.03) << k;
  }
}

TEST(Rician, ZeroKFactorIsRayleigh) {
  Rng rng(5);
  long above = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) above += sample_rician(0.0, rng) > 1.0;
  const double p = std::exp(-1.0);
  EXPECT_NEAR(static_cast<double>(above) / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Fading, RayleighIgnoresDistance) {
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_fading(FadingKind::Rayleigh, 10.0, a),
                                          sample_fading(FadingKind::Rayleigh, 900.0, b));
}

TEST(Fading, RicianUsesTheDistanceDependentKFactor) {
  Rng a(9), b(9);
  const double k = db_to_linear(rician_k_factor_db(50.0));
  for (int i = 0; i < 100; ++i)
    EXPECT_EQ(sample_fading(FadingKind::RicianDistanceDependent, 50.0, a), sample_rician(k, b));
}

}  // namespace
