#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "udn/diagnostics.hpp"
#include "udn/errors.hpp"
#include "udn/pathloss.hpp"

namespace {

using namespace udn;

const oracle::SmallCell kRef;

TEST(SmallCellModel, GainsMatchHandWrittenPowerLaws) {
  const auto model = make_3gpp_case();
  ASSERT_EQ(model.size(), 2);
  EXPECT_NEAR(model.piece(0).d_hi, kRef.d1, 1e-15);
  for (double r : {1e-4, 0.003, 0.02, 0.0677, 0.068, 0.3, 2.0, 50.0}) {
    EXPECT_NEAR(model.gain(r, Branch::LoS) / kRef.gain(r, true), 1.0, 1e-13) << r;
    EXPECT_NEAR(model.gain(r, Branch::NLoS) / kRef.gain(r, false), 1.0, 1e-13) << r;
    EXPECT_NEAR(model.los_probability(r), kRef.pr_los(r), 1e-15) << r;
  }
}

TEST(SmallCellModel, LosProbabilityAtKnownPoints) {
  const auto model = make_3gpp_case();
  EXPECT_NEAR(los_probability(model, 0.05), 1.0 - 5.0 * std::exp(-0.156 / 0.05), 1e-15);
  EXPECT_NEAR(los_probability(model, 0.2), 5.0 * std::exp(-0.2 / 0.03), 1e-15);
  // Left limit at d1 is exactly one half.
  EXPECT_NEAR(los_probability(model, kRef.d1), 0.5, 1e-12);
}

TEST(SmallCellModel, LosProbabilityJumpsUpAtTheBoundaryAndWarns) {
  // The preset is built once per process and may already have warned;
  // rebuilding from its pieces re-runs the checks.
  const auto pieces = make_3gpp_case().pieces();
  std::vector<std::string> messages;
  ScopedWarningSink sink([&](std::string_view m) { messages.emplace_back(m); });
  const PathLossModel model(pieces);
  ASSERT_EQ(messages.size(), 1u);
  EXPECT_NE(messages[0].find("jumps up"), std::string::npos);
  const double right = los_probability(model, std::nextafter(kRef.d1, 1.0));
  EXPECT_NEAR(right, 5.0 * std::exp(-kRef.d1 / 0.03), 1e-12);
  EXPECT_GT(right, 0.5);
}

TEST(SmallCellModel, InverseGainMatchesBisection) {
  const auto model = make_3gpp_case();
  for (Branch b : {Branch::LoS, Branch::NLoS}) {
    const bool los = b == Branch::LoS;
    for (double r : {2e-4, 0.01, 0.05, 0.09, 1.0, 30.0}) {
      const double g = kRef.gain(r, los);
      const double ref = oracle::bisect([&](double u) { return kRef.gain(u, los) - g; }, 1e-9, 1e6);
      EXPECT_NEAR(model.inverse_gain(g, b) / ref, 1.0, 1e-12) << to_string(b) << " " << r;
    }
  }
  EXPECT_TRUE(std::isinf(model.inverse_gain(0.0, Branch::LoS)));
}

TEST(SmallCellModel, BranchInversesAreMutuallyConsistent) {
  const auto model = make_3gpp_case();
  for (double r : {0.004, 0.03, 0.2, 3.0}) {
    // NLoS distance with the LoS gain at r, and back.
    const double rn = invert_nlos_to_los(model, r);
    EXPECT_NEAR(path_gain(model, rn, Branch::NLoS) / path_gain(model, r, Branch::LoS), 1.0, 1e-12);
    EXPECT_NEAR(invert_los_to_nlos(model, rn) / r, 1.0, 1e-12);
  }
}

TEST(SmallCellModel, LosDominatesBeyondTheCrossing) {
  const auto model = make_3gpp_case();
  // A_L r^-2.09 = A_N r^-3.75 at r = (A_N/A_L)^(1/1.66).
  const double crossing = std::pow(kRef.a_nlos / kRef.a_los, 1.0 / (kRef.alpha_nlos - kRef.alpha_los));
  EXPECT_NEAR(model.branch_crossing_km() / crossing, 1.0, 1e-12);
  EXPECT_NEAR(crossing * 1e3, 3.12, 0.01);
  EXPECT_TRUE(model.los_dominates_beyond(crossing * 1.001));
  EXPECT_FALSE(model.los_dominates_beyond(crossing * 0.5));
  for (double r = crossing * 1.01; r < 100.0; r *= 1.3)
    EXPECT_GT(model.gain(r, Branch::LoS), model.gain(r, Branch::NLoS)) << r;
}

TEST(SmallCellModel, LosCutoffBoundsTheLosProbability) {
  const auto model = make_3gpp_case();
  const double lc = model.los_cutoff_km();
  EXPECT_NEAR(lc, 0.03 * std::log(5e12), 1e-9);
  for (double r = lc; r < 10.0; r *= 1.1) EXPECT_LT(model.los_probability(r), 1e-12 * (1 + 1e-9));
  EXPECT_GT(model.los_probability(lc * 0.99), 1e-12);
}

TEST(PathLossModelCheck, RejectsInvalidTilings) {
  auto piece = [](double lo, double hi) {
    PathLossPiece p;
    p.d_lo = lo;
    p.d_hi = hi;
    p.alpha_los = 2.5;
    p.alpha_nlos = 3.5;
    return p;
  };
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NO_THROW(PathLossModel({piece(0.0, 0.1), piece(0.1, inf)}));
  EXPECT_THROW(PathLossModel({}), ConfigError);
  EXPECT_THROW(PathLossModel({piece(0.01, inf)}), ConfigError);
  EXPECT_THROW(PathLossModel({piece(0.0, 0.1)}), ConfigError);
  EXPECT_THROW(PathLossModel({piece(0.0, 0.1), piece(0.2, inf)}), ConfigError);
  EXPECT_THROW(PathLossModel({piece(0.0, 0.2), piece(0.1, inf)}), ConfigError);

  auto bad_alpha = piece(0.0, inf);
  bad_alpha.alpha_nlos = 0.0;
  EXPECT_THROW(PathLossModel({bad_alpha}), ConfigError);

  auto bad_gain = piece(0.0, inf);
  bad_gain.a_los = -1.0;
  EXPECT_THROW(PathLossModel({bad_gain}), ConfigError);

  auto bad_prob = piece(0.0, inf);
  bad_prob.los_prob = ConstantLos{1.5};
  EXPECT_THROW(PathLossModel({bad_prob}), ConfigError);

  // Increasing LoS probability within a piece.
  auto rising = piece(0.0, inf);
  rising.los_prob = ComplementExpLos{-1.0, 0.1};
  EXPECT_THROW(PathLossModel({rising}), ConfigError);

  // A gain that jumps up at a boundary breaks strict decrease.
  auto first = piece(0.0, 0.1);
  auto second = piece(0.1, inf);
  second.a_los = first.a_los * 10.0;
  EXPECT_THROW(PathLossModel({first, second}), ConfigError);
}

TEST(PathLossModelCheck, InverseOfAGainInsideADownwardJumpIsTheBoundary) {
  const double inf = std::numeric_limits<double>::infinity();
  PathLossPiece near{0.0, 0.1, 1.0, 2.0, 1.0, 3.0, ConstantLos{0.5}};
  PathLossPiece far{0.1, inf, 0.1, 2.0, 0.1, 3.0, ConstantLos{0.5}};
  const PathLossModel model({near, far});
  // Left limit of the LoS gain at 0.1 km is 100, right limit 10.
  EXPECT_NEAR(model.inverse_gain(50.0, Branch::LoS), 0.1, 1e-15);
  EXPECT_NEAR(model.inverse_gain(100.0, Branch::LoS), 0.1, 1e-12);
  EXPECT_NEAR(model.inverse_gain(1.0, Branch::LoS), std::sqrt(0.1), 1e-12);
  EXPECT_NEAR(model.inverse_gain(400.0, Branch::LoS), 0.05, 1e-12);
}

TEST(SingleSlope, HasNoLosComponent) {
  const auto model = make_single_slope_nlos(1e-14, 4.0);
  EXPECT_EQ(model.size(), 1);
  EXPECT_EQ(model.los_probability(0.01), 0.0);
  EXPECT_EQ(model.los_probability(10.0), 0.0);
  EXPECT_NEAR(model.gain(2.0, Branch::NLoS), 1e-14 / 16.0, 1e-28);
}

TEST(Distances, NonPositiveDistanceIsADomainError) {
  const auto model = make_3gpp_case();
  EXPECT_THROW(model.gain(0.0, Branch::LoS), DomainError);
  EXPECT_THROW(model.los_probability(-1.0), DomainError);
}

}  // namespace
