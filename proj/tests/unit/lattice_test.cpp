#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qmcforge/bernoulli.hpp"
#include "qmcforge/korobov_merit.hpp"
#include "qmcforge/lattice_cbc.hpp"
#include "oracle/oracle.hpp"
#include "support/generators.hpp"

namespace qf = qmcforge;
namespace oracle = qmcforge::oracle;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

qf::SpaceParams unit_params(int s, double alpha) { return {alpha, qf::WeightSet::constant(s)}; }

}  // namespace

TEST(LatticePoints, SmallRules) {
  const auto two = qf::lattice_points(qf::LatticeRule(2, {1}));
  EXPECT_EQ(two.numerators, (std::vector<std::vector<std::int64_t>>{{0}, {1}}));
  const auto five = qf::lattice_points(qf::LatticeRule(5, {1, 2}));
  EXPECT_EQ(five.numerators, (std::vector<std::vector<std::int64_t>>{{0, 0}, {1, 2}, {2, 4}, {3, 1}, {4, 3}}));
  const auto four = qf::lattice_points(qf::LatticeRule(4, {3}));
  EXPECT_EQ(four.numerators, (std::vector<std::vector<std::int64_t>>{{0}, {3}, {2}, {1}}));
}

TEST(LatticePoints, GeneratorOutOfRange) {
  EXPECT_THROW(qf::LatticeRule(5, {5}), qf::UsageError);
  EXPECT_THROW(qf::LatticeRule(1, {1}), qf::UsageError);
}

TEST(Bernoulli, KnownValues) {
  EXPECT_DOUBLE_EQ(qf::bernoulli_even(1, 0.0), 1.0 / 6);
  EXPECT_DOUBLE_EQ(qf::bernoulli_even(1, 0.5), -1.0 / 12);
  EXPECT_DOUBLE_EQ(qf::bernoulli_even(2, 0.0), -1.0 / 30);
  EXPECT_THROW(qf::bernoulli_even(5, 0.0), qf::UnsupportedError);
}

TEST(Totient, SmallValues) {
  EXPECT_EQ(qf::euler_totient(1), 1);
  EXPECT_EQ(qf::euler_totient(12), 4);
  EXPECT_EQ(qf::euler_totient(13), 12);
  for (std::int64_t n = 1; n <= 500; ++n) EXPECT_EQ(qf::euler_totient(n), oracle::brute_totient(n)) << n;
}

TEST(Primes, PrimitiveRootGeneratesGroup) {
  for (std::int64_t p : {3, 5, 13, 31, 127, 251, 1009}) {
    const std::int64_t g = qf::primitive_root(p);
    std::int64_t x = 1, order = 0;
    do {
      x = x * g % p;
      ++order;
    } while (x != 1);
    EXPECT_EQ(order, p - 1) << p;
  }
}

TEST(KorobovClosed, FivePointRule) {
  const auto r = qf::p_merit_closed(qf::LatticeRule(5, {1}), unit_params(1, 1));
  EXPECT_NEAR(*r.p_value, kPi2 / 75, 1e-14);
}

TEST(KorobovClosed, TwoPointRule) {
  EXPECT_NEAR(*qf::p_merit_closed(qf::LatticeRule(2, {1}), unit_params(1, 1)).p_value, kPi2 / 12, 1e-14);
}

TEST(KorobovClosed, ZeroWeights) {
  const qf::SpaceParams params(1.0, qf::WeightSet::product({0.0, 0.0}));
  EXPECT_EQ(*qf::p_merit_closed(qf::LatticeRule(7, {1, 3}), params).p_value, 0.0);
}

TEST(KorobovClosed, NonIntegerAlphaUnsupported) {
  EXPECT_THROW(qf::p_merit_closed(qf::LatticeRule(7, {1}), unit_params(1, 1.5)), qf::UnsupportedError);
}

TEST(KorobovClosed, MatchesDualEnumeration) {
  for (int trial = 0; trial < 25; ++trial) {
    const std::int64_t n = qf::testing::uniform_int(3, 17);
    const int s = static_cast<int>(qf::testing::uniform_int(1, 2));
    const auto rule = qf::testing::random_lattice(n, s);
    const auto w = qf::testing::random_product_weights(s);
    for (int alpha : {1, 2}) {
      const double closed = *qf::p_merit_closed(rule, {double(alpha), w}).p_value;
      const std::int64_t K = s == 1 ? 20000 : 300;
      const double brute = oracle::p_lattice_truncated(rule, alpha, w, K);
      // tail of sum over |k| > K in any coordinate, majorized crudely
      const double tail = 4.0 * s * std::pow(1 + 2 * qf::riemann_zeta(2.0 * alpha), s) * std::pow(double(K), 1.0 - 2 * alpha);
      EXPECT_LE(brute, closed + 1e-12);
      EXPECT_LE(closed - brute, tail) << n << " alpha " << alpha;
    }
  }
}

TEST(KorobovSeries, AgreesWithClosedForm) {
  const qf::LatticeRule rule(5, {1});
  const auto series = qf::p_merit_series(rule, unit_params(1, 1), 10000);
  EXPECT_LE(kPi2 / 75 - *series.p_value, *series.truncation_bound);
  EXPECT_GE(kPi2 / 75, *series.p_value);
  EXPECT_LT(kPi2 / 75 - *series.p_value, 4e-4 * kPi2 / 75);

  const qf::LatticeRule pair(5, {1, 2});
  const auto closed = qf::p_merit_closed(pair, unit_params(2, 1));
  const auto s2 = qf::p_merit_series(pair, unit_params(2, 1), 200);
  EXPECT_LE(std::abs(*closed.p_value - *s2.p_value), *s2.truncation_bound + 1e-12);
}

TEST(KorobovSeries, RadiusBelowModulusRejected) {
  EXPECT_THROW(qf::p_merit_series(qf::LatticeRule(31, {1}), unit_params(1, 1), 20), qf::UsageError);
}

TEST(KorobovSeries, ZeroWeightsHaveZeroTail) {
  const auto r = qf::p_merit_series(qf::LatticeRule(7, {1, 2}), {1.5, qf::WeightSet::product({0.0, 0.0})}, 100);
  EXPECT_EQ(*r.p_value, 0.0);
  EXPECT_EQ(*r.truncation_bound, 0.0);
}

TEST(KorobovSeries, FractionalAlphaBracketsEnumeration) {
  const qf::LatticeRule rule(13, {1, 5});
  const auto w = qf::testing::power_weights(2, -2);
  const auto r = qf::p_merit_series(rule, {1.5, w}, 2000);
  const double brute = oracle::p_lattice_truncated(rule, 1.5, w, 300);
  EXPECT_LE(brute, *r.p_value + *r.truncation_bound);
  EXPECT_GE(*r.p_value + 1e-12, brute);
}

TEST(ZarembaRho, FivePointPair) {
  const auto r = qf::zaremba_rho(qf::LatticeRule(5, {1, 2}), unit_params(2, 1));
  EXPECT_DOUBLE_EQ(*r.rho_value, 0.25);
  EXPECT_EQ(*r.find(qf::CoordSet::of({1}))->phi, 5);
  EXPECT_EQ(*r.find(qf::CoordSet::of({2}))->phi, 5);
  EXPECT_EQ(*r.find(qf::CoordSet::of({1, 2}))->phi, 2);
}

TEST(ZarembaRho, SingleCoordinate) {
  for (std::int64_t n : {2, 7, 64}) {
    EXPECT_DOUBLE_EQ(*qf::zaremba_rho(qf::LatticeRule(n, {1}), unit_params(1, 1)).rho_value, 1.0 / double(n * n));
  }
}

TEST(ZarembaRho, PhiMatchesDualEnumeration) {
  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t n = qf::testing::uniform_int(3, 24);
    const auto rule = qf::testing::random_lattice(n, 2);
    const auto r = qf::zaremba_rho(rule, unit_params(2, 1));
    std::int64_t best = INT64_MAX;
    for (const auto& d : oracle::dual_enumerate_lattice(rule, n)) {
      if (d.k[0] != 0 && d.k[1] != 0) best = std::min(best, std::abs(d.k[0]) * std::abs(d.k[1]));
    }
    EXPECT_EQ(*r.find(qf::CoordSet::of({1, 2}))->phi, best);
  }
}

TEST(ZarembaRho, BelowMerit) {
  for (int trial = 0; trial < 20; ++trial) {
    const auto rule = qf::testing::random_lattice(qf::testing::uniform_int(3, 60), 3);
    const qf::SpaceParams params(1.0, qf::testing::random_product_weights(3));
    EXPECT_LE(*qf::zaremba_rho(rule, params).rho_value, *qf::p_merit_closed(rule, params).p_value * (1 + 1e-12));
  }
}

TEST(LatticeCbc, FirstComponentIsOne) {
  for (std::int64_t n : {2, 9, 31}) EXPECT_EQ(qf::cbc_construct(n, 1, unit_params(1, 1)).first.generator()[0], 1);
}

TEST(LatticeCbc, TieBreakPicksSmallest) {
  const auto [rule, trace] = qf::cbc_construct(5, 2, unit_params(2, 1));
  EXPECT_EQ(rule.generator(), (std::vector<std::int64_t>{1, 2}));
}

TEST(LatticeCbc, GreedyStepIsOptimalAmongExtensions) {
  const auto params = qf::SpaceParams(1.0, qf::testing::power_weights(3, -2));
  const auto [rule, trace] = qf::cbc_construct(23, 3, params);
  ASSERT_EQ(trace.steps.size(), 3u);
  for (int d = 2; d <= 3; ++d) {
    std::vector<std::int64_t> prefix(rule.generator().begin(), rule.generator().begin() + d - 1);
    for (std::int64_t c = 1; c < 23; ++c) {
      auto z = prefix;
      z.push_back(c);
      EXPECT_GE(*qf::p_merit_closed(qf::LatticeRule(23, z), params).p_value, trace.steps[d - 1].merit * (1 - 1e-12));
    }
  }
  EXPECT_NEAR(trace.steps.back().merit, *qf::p_merit_closed(rule, params).p_value, 1e-15);
}

TEST(LatticeCbc, FastMatchesNaive) {
  for (std::int64_t n : {13, 31}) {
    const auto w = qf::testing::power_weights(4, -2);
    const auto naive = qf::cbc_construct(n, 4, {1.0, w});
    const auto fast = qf::cbc_construct_fast(n, 4, 1, w.gamma());
    EXPECT_EQ(naive.first.generator(), fast.first.generator());
    for (std::size_t i = 0; i < naive.second.steps.size(); ++i) {
      EXPECT_NEAR(naive.second.steps[i].merit, fast.second.steps[i].merit, 1e-9 * naive.second.steps[i].merit);
    }
  }
}

TEST(LatticeCbc, FastRejectsComposite) {
  EXPECT_THROW(qf::cbc_construct_fast(15, 2, 1, {1.0, 0.25}), qf::UsageError);
}

TEST(LatticeCbc, FastSingleCoordinate) {
  EXPECT_EQ(qf::cbc_construct_fast(13, 1, 1, {1.0}).first.generator(), std::vector<std::int64_t>{1});
}
