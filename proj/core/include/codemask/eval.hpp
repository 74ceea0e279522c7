#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "codemask/formats.hpp"
#include "codemask/metrics.hpp"
#include "codemask/stats.hpp"

namespace codemask {

struct ExclusionResult {
  std::vector<std::string> shared;    // dataset order
  std::vector<std::string> excluded;  // dataset order
};

/// Drops instances whose declared reference lengths disagree across the
/// prediction sets. A set without a declaration for an instance is taken to
/// agree with the dataset's masked length; with no declarations at all the
/// exclusion is inert. Throws Error on predictions for unknown instances.
ExclusionResult excludeMismatches(const Dataset& dataset, const std::vector<const PredictionSet*>& sets);
ExclusionResult excludeMismatches(const Dataset& dataset, const PredictionSet& a, const PredictionSet& b);

/// Reporting bucket for a masked span: the length itself for token and
/// construct level, ceil(length / 5) * 5 for block level.
std::size_t lengthBucket(MaskLevel level, std::size_t maskedLength);

struct InstanceResult {
  std::string instanceId;
  std::size_t maskedLength = 0;
  std::size_t bucket = 0;
  bool predicted = false;  // false: no prediction, scored against an empty sequence
  MetricValues metrics;
};

struct BucketAggregate {
  std::size_t bucket = 0;
  std::size_t count = 0;
  std::size_t perfect = 0;
  double perfectRate() const noexcept { return count ? static_cast<double>(perfect) / count : 0.0; }
};

struct Aggregates {
  std::size_t count = 0;
  std::size_t perfect = 0;
  std::size_t missing = 0;
  std::array<std::optional<double>, 4> meanBleu;  // over instances where BLEU-n applies
  std::array<std::size_t, 4> bleuCount{};
  double meanLevNorm = 0.0;
  std::vector<BucketAggregate> buckets;  // ascending bucket

  double perfectRate() const noexcept { return count ? static_cast<double>(perfect) / count : 0.0; }
};

struct ModelEvaluation {
  std::string modelTag;
  std::vector<InstanceResult> instances;  // dataset order, included instances only
  Aggregates aggregates;
};

/// Scores one model over `included` (all dataset instances when empty).
/// Throws Error on an empty dataset or predictions for unknown instances.
ModelEvaluation evaluate(const Dataset& dataset, const PredictionSet& predictions,
                         const std::vector<std::string>& included = {}, unsigned jobs = 1);

Aggregates aggregate(const std::vector<InstanceResult>& instances);

struct Comparison {
  std::string modelA;
  std::string modelB;
  PairedOutcomeTable table;
  std::string status = "ok";  // "ok" or "no discordance"
  std::optional<TestResult> mcnemar;
  std::optional<OddsRatio> oddsRatio;
  std::optional<double> adjustedP;        // Benjamini-Hochberg across the run
  std::optional<TestResult> levWilcoxon;  // signed-rank on paired levNorm differences
};

/// Pairwise comparisons over instances both evaluations contain, in the
/// order (0,1), (0,2), ..., (1,2), ... BH adjustment spans every pair with a
/// defined McNemar test.
std::vector<Comparison> compareModels(const std::vector<ModelEvaluation>& evaluations);

Comparison compare(const ModelEvaluation& a, const ModelEvaluation& b);

struct EvaluationReport {
  std::vector<ModelEvaluation> models;
  std::vector<Comparison> comparisons;
  std::vector<std::string> excluded;
  Json config = Json::object();
};

/// Full driver: mismatch exclusion across all sets, per-model evaluation,
/// pairwise comparison when there are two or more sets.
EvaluationReport buildReport(const Dataset& dataset, const std::vector<PredictionSet>& sets, unsigned jobs = 1);

Json toJson(const EvaluationReport& report);
std::string renderSummary(const EvaluationReport& report);

// Levenshtein strata of the review sample.
enum class LevBucket { Low, MidLow, MidHigh, High };
std::string_view toString(LevBucket bucket) noexcept;

/// (0, .25) / [.25, .5) / [.5, .75) / [.75, 1].
std::optional<LevBucket> levBucket(double levNorm) noexcept;

struct ReviewRow {
  std::string instanceId;
  LevBucket bucket = LevBucket::Low;
  TextSeq prefix;
  TextSeq masked;
  TextSeq suffix;
  TextSeq predicted;
};

struct ReviewSample {
  std::vector<ReviewRow> rows;  // grouped by bucket, dataset order inside a bucket
  std::vector<std::string> warnings;
};

/// Seeded draw of `perBucket` non-perfect predictions from each bucket.
/// Short buckets are taken whole with a warning.
ReviewSample sampleNonPerfect(const ModelEvaluation& evaluation, const Dataset& dataset,
                              const PredictionSet& predictions, std::uint64_t seed, std::size_t perBucket = 25);

std::string reviewSheetCsv(const ReviewSample& sample);

}  // namespace codemask
