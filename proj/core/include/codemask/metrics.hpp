#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "codemask/token.hpp"

namespace codemask {

struct MetricValues {
  bool perfect = false;
  std::array<std::optional<double>, 4> bleu;  // BLEU-1..4; empty when not applicable
  double levNorm = 1.0;
};

bool perfectMatch(const TextSeq& pred, const TextSeq& ref);

/// Cumulative BLEU-n (uniform weights over orders 1..n, clipped precision,
/// brevity penalty, no smoothing). Not applicable when |ref| < n.
std::optional<double> bleuN(const TextSeq& pred, const TextSeq& ref, int n);

/// Token edit distance with unit costs.
std::size_t levenshtein(const TextSeq& a, const TextSeq& b);

/// levenshtein / max(|pred|, |ref|); 0 when both are empty.
double levNorm(const TextSeq& pred, const TextSeq& ref);

MetricValues computeMetrics(const TextSeq& pred, const TextSeq& ref);

}  // namespace codemask
