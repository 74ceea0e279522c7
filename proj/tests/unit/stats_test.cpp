#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "codemask/error.hpp"
#include "codemask/random.hpp"
#include "codemask/stats.hpp"
#include "reference.hpp"

using namespace codemask;

TEST(Stats, GammaAndSurvival) {
  // scipy.special.gammaincc reference values
  EXPECT_NEAR(regularizedGammaQ(2.5, 3.7), 0.1925504330793957, 1e-10);
  EXPECT_NEAR(regularizedGammaQ(7.0, 2.0), 0.9954661944737512, 1e-10);
  for (double x : {0.01, 0.5, 1.0, 3.84, 4.05, 10.0, 25.0}) {
    EXPECT_NEAR(chiSquareSurvival(x, 1.0), oracle::chiSquare1Survival(x), 1e-10) << x;
  }
  EXPECT_NEAR(chiSquareSurvival(4.0, 2.0), std::exp(-2.0), 1e-12);
  EXPECT_NEAR(normalSurvival(1.959963984540054), 0.025, 1e-9);
  EXPECT_DOUBLE_EQ(normalSurvival(0.0), 0.5);
}

TEST(Stats, McNemar) {
  const auto r = mcnemar({0, 15, 5, 0});
  EXPECT_NEAR(r.statistic, 4.05, 1e-12);
  EXPECT_NEAR(r.pValue, oracle::chiSquare1Survival(4.05), 1e-10);
  EXPECT_NEAR(r.pValue, 0.0442, 1e-3);
  EXPECT_THROW(mcnemar({7, 0, 0, 3}), UndefinedTestError);
  const auto tie = mcnemar({0, 500, 500, 0});
  EXPECT_NEAR(tie.statistic, 1.0 / 1000.0, 1e-12);
  EXPECT_GT(tie.pValue, 0.97);
}

TEST(Stats, OddsRatio) {
  EXPECT_DOUBLE_EQ(oddsRatio({0, 10, 5, 0}).ratio, 2.0);
  EXPECT_FALSE(oddsRatio({0, 10, 5, 0}).haldaneCorrected);
  const auto corrected = oddsRatio({0, 0, 4, 0});
  EXPECT_NEAR(corrected.ratio, 0.5 / 4.5, 1e-12);
  EXPECT_TRUE(corrected.haldaneCorrected);
  EXPECT_DOUBLE_EQ(oddsRatio({3, 6, 6, 1}).ratio, 1.0);
}

TEST(Stats, BenjaminiHochberg) {
  const auto adj = benjaminiHochberg({0.01, 0.04, 0.03});
  ASSERT_EQ(adj.size(), 3u);
  EXPECT_NEAR(adj[0], 0.03, 1e-12);
  EXPECT_NEAR(adj[1], 0.04, 1e-12);
  EXPECT_NEAR(adj[2], 0.04, 1e-12);
  EXPECT_EQ(benjaminiHochberg({0.2}), std::vector<double>{0.2});
  for (double v : benjaminiHochberg({0.3, 0.3, 0.3, 0.3})) EXPECT_DOUBLE_EQ(v, 0.3);
  EXPECT_DOUBLE_EQ(benjaminiHochberg({0.9, 0.8})[0], 0.9);
  EXPECT_TRUE(benjaminiHochberg({}).empty());
  EXPECT_THROW(benjaminiHochberg({0.5, 1.2}), Error);
  EXPECT_THROW(benjaminiHochberg({-0.1}), Error);
}

TEST(Stats, Ranks) { EXPECT_EQ(averageRanks({10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1})); }

TEST(Stats, SignedRank) {
  std::vector<double> d{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto r = wilcoxonSignedRank(d);
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  // scipy.stats.wilcoxon(correction=True, method="approx")
  EXPECT_NEAR(r.pValue, 0.005921537024148715, 1e-9);
  EXPECT_LT(r.pValue, 0.01);
  EXPECT_TRUE(r.smallSample);

  const auto ties = wilcoxonSignedRank({1, -2, 2, 3, -3, 3, 4, 5, -1, 6, 7, 7, -8, 9, 2, 0});
  EXPECT_DOUBLE_EQ(ties.statistic, 26.5);
  EXPECT_NEAR(ties.pValue, 0.06037236968394283, 1e-9);

  EXPECT_THROW(wilcoxonSignedRank({0, 0, 0}), UndefinedTestError);
  EXPECT_THROW(wilcoxonSignedRank({}), UndefinedTestError);
}

TEST(Stats, RankSum) {
  const auto r = wilcoxonRankSum({1, 2, 3}, {101, 102, 103});
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  // scipy.stats.mannwhitneyu(method="asymptotic", use_continuity=True)
  EXPECT_NEAR(r.pValue, 0.08085559837005224, 1e-9);

  const auto ties = wilcoxonRankSum({1, 2, 2, 5, 7, 7, 9}, {3, 2, 8, 8, 10, 11});
  EXPECT_DOUBLE_EQ(ties.statistic, 11.0);
  EXPECT_NEAR(ties.pValue, 0.17116553587796612, 1e-9);

  const auto same = wilcoxonRankSum({1, 2, 3, 4, 5}, {1, 2, 3, 4, 5});
  EXPECT_GT(same.pValue, 0.99);
  EXPECT_THROW(wilcoxonRankSum({}, {1, 2}), Error);
}

TEST(StatsProperty, McNemarSymmetryAndOddsInversion) {
  for (std::uint64_t b = 1; b < 30; ++b) {
    for (std::uint64_t c = 1; c < 30; ++c) {
      const auto x = mcnemar({0, b, c, 0});
      const auto y = mcnemar({0, c, b, 0});
      EXPECT_DOUBLE_EQ(x.statistic, y.statistic);
      EXPECT_DOUBLE_EQ(x.pValue, y.pValue);
      EXPECT_GE(x.pValue, 0.0);
      EXPECT_LE(x.pValue, 1.0);
      EXPECT_NEAR(oddsRatio({0, b, c, 0}).ratio, 1.0 / oddsRatio({0, c, b, 0}).ratio, 1e-12);
    }
  }
}

TEST(StatsProperty, BenjaminiHochbergMonotoneAndOrderPreserving) {
  Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> p(1 + rng.below(30));
    for (auto& v : p) v = rng.uniform01();
    const auto adj = benjaminiHochberg(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      ASSERT_GE(adj[i], p[i]);
      ASSERT_LE(adj[i], 1.0);
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[i] < p[j]) {
          ASSERT_LE(adj[i], adj[j]);
        }
      }
    }
  }
}

TEST(StatsProperty, SignedRankScaleInvariant) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> d(5 + rng.below(40));
    for (auto& v : d) v = static_cast<double>(rng.below(21)) - 10.0;
    if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) continue;
    std::vector<double> scaled(d);
    for (auto& v : scaled) v *= 3.7;
    const auto a = wilcoxonSignedRank(d);
    const auto b = wilcoxonSignedRank(scaled);
    EXPECT_DOUBLE_EQ(a.statistic, b.statistic);
    EXPECT_DOUBLE_EQ(a.pValue, b.pValue);
    EXPECT_GE(a.pValue, 0.0);
    EXPECT_LE(a.pValue, 1.0);
  }
}
