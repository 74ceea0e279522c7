#include "codemask/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "codemask/error.hpp"

namespace codemask {

namespace {

constexpr double kEpsilon = 1e-15;
constexpr int kMaxIterations = 10000;

// Series for P(a, x), valid for x < a + 1.
double gammaPSeries(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEpsilon) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gammaQContinuedFraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEpsilon;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double clampProbability(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

double regularizedGammaQ(double a, double x) {
  if (a <= 0.0) throw Error("gamma shape must be positive");
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gammaPSeries(a, x);
  return gammaQContinuedFraction(a, x);
}

double chiSquareSurvival(double x, double degreesOfFreedom) {
  return clampProbability(regularizedGammaQ(degreesOfFreedom / 2.0, x / 2.0));
}

double normalSurvival(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

TestResult mcnemar(const PairedOutcomeTable& table) {
  const std::uint64_t discordant = table.b + table.c;
  if (discordant == 0) throw UndefinedTestError("no discordance: McNemar's test needs b + c >= 1");
  const double diff = std::fabs(static_cast<double>(table.b) - static_cast<double>(table.c)) - 1.0;
  TestResult r;
  r.statistic = diff * diff / static_cast<double>(discordant);
  r.pValue = chiSquareSurvival(r.statistic, 1.0);
  return r;
}

OddsRatio oddsRatio(const PairedOutcomeTable& table) {
  OddsRatio r;
  if (table.b == 0 || table.c == 0) {
    r.haldaneCorrected = true;
    r.ratio = (static_cast<double>(table.b) + 0.5) / (static_cast<double>(table.c) + 0.5);
  } else {
    r.ratio = static_cast<double>(table.b) / static_cast<double>(table.c);
  }
  return r;
}

std::vector<double> benjaminiHochberg(const std::vector<double>& pValues) {
  for (double p : pValues) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("p-value outside [0, 1]");
  }
  const std::size_t m = pValues.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pValues[x] < pValues[y]; });
  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double scaled = pValues[order[r]] * static_cast<double>(m) / static_cast<double>(r + 1);
    running = std::min(running, scaled);
    // max() guards against p * m / m rounding below p
    adjusted[order[r]] = std::max(pValues[order[r]], std::min(running, 1.0));
  }
  return adjusted;
}

std::vector<double> averageRanks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Sum over tie groups of (t^3 - t).
double tieTerm(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const auto t = static_cast<double>(j - i);
    sum += t * t * t - t;
    i = j;
  }
  return sum;
}

double twoSidedNormalP(double statistic, double mean, double variance) {
  if (variance <= 0.0) return 1.0;
  const double z = std::max(0.0, std::fabs(statistic - mean) - 0.5) / std::sqrt(variance);
  return clampProbability(2.0 * normalSurvival(z));
}

}  // namespace

TestResult wilcoxonSignedRank(const std::vector<double>& pairedDiffs) {
  std::vector<double> nonzero;
  for (double d : pairedDiffs) {
    if (d != 0.0) nonzero.push_back(d);
  }
  if (nonzero.empty()) throw UndefinedTestError("all paired differences are zero");
  std::vector<double> magnitudes(nonzero.size());
  std::transform(nonzero.begin(), nonzero.end(), magnitudes.begin(), [](double d) { return std::fabs(d); });
  const auto ranks = averageRanks(magnitudes);
  double positive = 0.0;
  double negative = 0.0;
  for (std::size_t i = 0; i < nonzero.size(); ++i) (nonzero[i] > 0 ? positive : negative) += ranks[i];

  const auto n = static_cast<double>(nonzero.size());
  const double mean = n * (n + 1.0) / 4.0;
  const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tieTerm(magnitudes) / 48.0;
  TestResult r;
  r.statistic = std::min(positive, negative);
  r.pValue = twoSidedNormalP(r.statistic, mean, variance);
  r.smallSample = nonzero.size() < 20;
  return r;
}

TestResult wilcoxonRankSum(const std::vector<double>& sampleA, const std::vector<double>& sampleB) {
  if (sampleA.empty() || sampleB.empty()) throw Error("rank-sum test needs two nonempty samples");
  std::vector<double> pooled = sampleA;
  pooled.insert(pooled.end(), sampleB.begin(), sampleB.end());
  const auto ranks = averageRanks(pooled);
  const double rankSumA =
      std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(sampleA.size()), 0.0);

  const auto na = static_cast<double>(sampleA.size());
  const auto nb = static_cast<double>(sampleB.size());
  const double n = na + nb;
  const double uA = rankSumA - na * (na + 1.0) / 2.0;
  const double uB = na * nb - uA;
  const double mean = na * nb / 2.0;
  const double variance = na * nb / 12.0 * ((n + 1.0) - tieTerm(pooled) / (n * (n - 1.0)));
  TestResult r;
  r.statistic = std::min(uA, uB);
  r.pValue = twoSidedNormalP(r.statistic, mean, variance);
  r.smallSample = sampleA.size() + sampleB.size() < 20;
  return r;
}

}  // namespace codemask
