#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qmcforge/weights.hpp"
#include "qmcforge/zeta.hpp"
#include "oracle/oracle.hpp"
#include "support/generators.hpp"

namespace qf = qmcforge;

TEST(Weights, ProductWeightOfPair) {
  const auto w = qf::WeightSet::product({1.0, 0.25, 1.0 / 9});
  EXPECT_DOUBLE_EQ(w.weight(std::vector<int>{1, 2}), 0.25);
}

TEST(Weights, PodFactorialOrder) {
  const auto w = qf::WeightSet::pod({1, 2, 6}, {1, 1, 1});
  EXPECT_DOUBLE_EQ(w.weight(std::vector<int>{1, 2, 3}), 6.0);
}

TEST(Weights, ExplicitDefaultsToZero) {
  const auto w = qf::WeightSet::explicit_map({{qf::CoordSet::of({1}), 0.5}});
  EXPECT_EQ(w.weight(std::vector<int>{2}), 0.0);
}

TEST(Weights, EmptySubsetRejected) { EXPECT_THROW(qf::WeightSet::product({1.0}).weight(qf::CoordSet()), qf::UsageError); }

TEST(Weights, MonotoneCases) {
  EXPECT_TRUE(qf::check_monotone(qf::WeightSet::product({1.0, 0.5, 0.9, 0.2}), 4));
  EXPECT_FALSE(qf::check_monotone(
      qf::WeightSet::explicit_map({{qf::CoordSet::of({1}), 0.1}, {qf::CoordSet::of({1, 2}), 0.5}}), 2));
  EXPECT_FALSE(qf::check_monotone(qf::WeightSet::pod({1, 3}, {1, 1}), 2));
}

TEST(Weights, MonotoneAgreesWithPairScan) {
  for (int trial = 0; trial < 40; ++trial) {
    std::map<qf::CoordSet, double> values;
    for (int mask = 1; mask < 8; ++mask) {
      if (qf::testing::uniform_int(0, 3) > 0) values[qf::CoordSet(mask)] = qf::testing::uniform_real(0.0, 1.0);
    }
    const auto w = qf::WeightSet::explicit_map(values);
    bool expect = true;
    for (int u = 1; u < 8; ++u) {
      for (int v = 1; v < u; ++v) {
        if ((v & u) == v && w.weight(qf::CoordSet(v)) < w.weight(qf::CoordSet(u))) expect = false;
      }
    }
    EXPECT_EQ(qf::check_monotone(w, 3), expect);
  }
}

TEST(Weights, ZetaSumSingleCoordinate) {
  EXPECT_NEAR(qf::weighted_zeta_sum(qf::WeightSet::product({1.0}), 1, 1.0, 1.0), std::numbers::pi * std::numbers::pi / 3,
              1e-12);
}

TEST(Weights, ZetaSumZeroWeights) {
  EXPECT_EQ(qf::weighted_zeta_sum(qf::WeightSet::product({0.0, 0.0}), 2, 1.0, 1.0), 0.0);
}

TEST(Weights, ZetaSumProductMatchesSubsetEnumeration) {
  const double z2 = std::numbers::pi * std::numbers::pi / 6;
  const double expect = (1 + 2 * z2) * (1 + 2 * z2 / 4) - 1;
  EXPECT_NEAR(qf::weighted_zeta_sum(qf::testing::power_weights(2, -2), 2, 1.0, 1.0), expect, 1e-12);
}

TEST(Weights, ZetaSumAllKindsMatchEnumeration) {
  const std::vector<qf::WeightSet> sets = {
      qf::testing::power_weights(5, -2), qf::WeightSet::pod({1, 2, 6, 24, 120}, {0.5, 0.25, 0.125, 0.1, 0.05}),
      qf::WeightSet::order_dependent({0.9, 0.5, 0.2, 0.1, 0.01})};
  for (const auto& w : sets) {
    for (double lambda : {1.0, 0.75}) {
      double expect = 0.0;
      const double f = 2 * qf::riemann_zeta(2 * 1.0 * lambda);
      qf::for_each_nonempty_subset(5, [&](qf::CoordSet u) { expect += std::pow(w.weight(u), lambda) * std::pow(f, u.size()); });
      EXPECT_NEAR(qf::weighted_zeta_sum(w, 5, lambda, 1.0), expect, 1e-10 * expect);
    }
  }
}

TEST(Weights, ZetaSumDivergentRejected) {
  EXPECT_THROW(qf::weighted_zeta_sum(qf::WeightSet::product({1.0}), 1, 0.5, 1.0), qf::DomainError);
}

TEST(Weights, SmoothnessMustExceedHalf) {
  EXPECT_THROW(qf::SpaceParams(0.5, qf::WeightSet::product({1.0})), qf::DomainError);
}

TEST(Zeta, MatchesDirectSummation) {
  for (double x : {1.5, 2.0, 3.0, 4.0, 2.7}) {
    EXPECT_NEAR(qf::riemann_zeta(x), qf::oracle::brute_zeta(x, 200000), 1e-9) << x;
  }
}
