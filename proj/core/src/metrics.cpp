#include "codemask/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "codemask/error.hpp"

namespace codemask {

namespace {

std::map<TextSeq, std::size_t> ngramCounts(const TextSeq& tokens, std::size_t n) {
  std::map<TextSeq, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[TextSeq(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                     tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

bool perfectMatch(const TextSeq& pred, const TextSeq& ref) { return pred == ref; }

std::optional<double> bleuN(const TextSeq& pred, const TextSeq& ref, int n) {
  if (n < 1 || n > 4) throw Error("BLEU order must be in 1..4");
  if (ref.size() < static_cast<std::size_t>(n)) return std::nullopt;
  if (pred.empty()) return 0.0;

  double logSum = 0.0;
  for (int k = 1; k <= n; ++k) {
    const auto order = static_cast<std::size_t>(k);
    if (pred.size() < order) return 0.0;
    const auto predGrams = ngramCounts(pred, order);
    const auto refGrams = ngramCounts(ref, order);
    std::size_t clipped = 0;
    for (const auto& [gram, count] : predGrams) {
      const auto it = refGrams.find(gram);
      if (it != refGrams.end()) clipped += std::min(count, it->second);
    }
    if (clipped == 0) return 0.0;
    const auto total = pred.size() - order + 1;
    logSum += std::log(static_cast<double>(clipped) / static_cast<double>(total));
  }
  const double brevity = pred.size() < ref.size()
                             ? std::exp(1.0 - static_cast<double>(ref.size()) / static_cast<double>(pred.size()))
                             : 1.0;
  return brevity * std::exp(logSum / n);
}

std::size_t levenshtein(const TextSeq& a, const TextSeq& b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      const std::size_t substitution = diagonal + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({above + 1, row[j - 1] + 1, substitution});
      diagonal = above;
    }
  }
  return row[b.size()];
}

double levNorm(const TextSeq& pred, const TextSeq& ref) {
  const std::size_t longest = std::max(pred.size(), ref.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(pred, ref)) / static_cast<double>(longest);
}

MetricValues computeMetrics(const TextSeq& pred, const TextSeq& ref) {
  MetricValues m;
  m.perfect = perfectMatch(pred, ref);
  for (int n = 1; n <= 4; ++n) m.bleu[static_cast<std::size_t>(n - 1)] = bleuN(pred, ref, n);
  m.levNorm = levNorm(pred, ref);
  return m;
}

}  // namespace codemask
