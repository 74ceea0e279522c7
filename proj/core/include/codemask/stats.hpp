#pragma once

#include <cstdint>
#include <vector>

namespace codemask {

// Matched-pairs contingency table over perfect-prediction indicators.
struct PairedOutcomeTable {
  std::uint64_t a = 0;  // both correct
  std::uint64_t b = 0;  // only the first correct
  std::uint64_t c = 0;  // only the second correct
  std::uint64_t d = 0;  // both wrong

  std::uint64_t total() const noexcept { return a + b + c + d; }
  friend bool operator==(const PairedOutcomeTable&, const PairedOutcomeTable&) = default;
};

struct TestResult {
  double statistic = 0.0;
  double pValue = 1.0;
  bool smallSample = false;  // fewer than 20 observations for a normal approximation
};

struct OddsRatio {
  double ratio = 1.0;
  bool haldaneCorrected = false;
};

/// Regularized upper incomplete gamma Q(a, x).
double regularizedGammaQ(double a, double x);
double chiSquareSurvival(double x, double degreesOfFreedom);
double normalSurvival(double z);

/// Continuity-corrected McNemar: (|b - c| - 1)^2 / (b + c) against chi-square(1).
/// Throws UndefinedTestError when b + c == 0.
TestResult mcnemar(const PairedOutcomeTable& table);

/// b / c, with Haldane's +0.5 correction when either is zero.
OddsRatio oddsRatio(const PairedOutcomeTable& table);

/// Benjamini-Hochberg step-up adjustment, returned in input order.
std::vector<double> benjaminiHochberg(const std::vector<double>& pValues);

/// Two-sided normal approximation with tie and continuity corrections.
/// Statistic is min(W+, W-). Zero differences are dropped; throws
/// UndefinedTestError when nothing remains.
TestResult wilcoxonSignedRank(const std::vector<double>& pairedDiffs);

/// Two-sided Mann-Whitney form. Statistic is min(U_a, U_b).
TestResult wilcoxonRankSum(const std::vector<double>& sampleA, const std::vector<double>& sampleB);

/// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> averageRanks(const std::vector<double>& values);

}  // namespace codemask
