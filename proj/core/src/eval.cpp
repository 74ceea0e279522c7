#include "codemask/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

#include "codemask/error.hpp"
#include "codemask/parallel.hpp"
#include "codemask/random.hpp"

namespace codemask {

ExclusionResult excludeMismatches(const Dataset& dataset, const std::vector<const PredictionSet*>& sets) {
  for (const auto* set : sets) checkPredictionsAgainst(dataset, *set);
  ExclusionResult result;
  for (const auto& inst : dataset.instances()) {
    std::optional<std::size_t> first;
    bool agree = true;
    for (const auto* set : sets) {
      const auto* p = set->find(inst.instanceId);
      const std::size_t declared = p && p->referenceLength ? *p->referenceLength : inst.masked.size();
      if (!first) {
        first = declared;
      } else if (*first != declared) {
        agree = false;
        break;
      }
    }
    (agree ? result.shared : result.excluded).push_back(inst.instanceId);
  }
  return result;
}

ExclusionResult excludeMismatches(const Dataset& dataset, const PredictionSet& a, const PredictionSet& b) {
  return excludeMismatches(dataset, std::vector<const PredictionSet*>{&a, &b});
}

std::size_t lengthBucket(MaskLevel level, std::size_t maskedLength) {
  if (level != MaskLevel::Block) return maskedLength;
  return (maskedLength + 4) / 5 * 5;
}

Aggregates aggregate(const std::vector<InstanceResult>& instances) {
  Aggregates agg;
  agg.count = instances.size();
  std::array<double, 4> bleuSum{};
  double levSum = 0.0;
  std::map<std::size_t, BucketAggregate> buckets;
  for (const auto& r : instances) {
    if (r.metrics.perfect) ++agg.perfect;
    if (!r.predicted) ++agg.missing;
    for (std::size_t n = 0; n < 4; ++n) {
      if (r.metrics.bleu[n]) {
        bleuSum[n] += *r.metrics.bleu[n];
        ++agg.bleuCount[n];
      }
    }
    levSum += r.metrics.levNorm;
    auto& b = buckets[r.bucket];
    b.bucket = r.bucket;
    ++b.count;
    if (r.metrics.perfect) ++b.perfect;
  }
  for (std::size_t n = 0; n < 4; ++n) {
    if (agg.bleuCount[n]) agg.meanBleu[n] = bleuSum[n] / static_cast<double>(agg.bleuCount[n]);
  }
  if (agg.count) agg.meanLevNorm = levSum / static_cast<double>(agg.count);
  for (auto& [_, b] : buckets) agg.buckets.push_back(b);
  return agg;
}

ModelEvaluation evaluate(const Dataset& dataset, const PredictionSet& predictions,
                         const std::vector<std::string>& included, unsigned jobs) {
  if (dataset.empty()) throw Error("cannot evaluate an empty dataset");
  checkPredictionsAgainst(dataset, predictions);

  std::vector<const MaskedInstance*> targets;
  if (included.empty()) {
    for (const auto& inst : dataset.instances()) targets.push_back(&inst);
  } else {
    for (const auto& id : included) {
      const auto* inst = dataset.find(id);
      if (!inst) throw Error("unknown instance " + id);
      targets.push_back(inst);
    }
  }

  ModelEvaluation eval;
  eval.modelTag = predictions.modelTag();
  eval.instances.resize(targets.size());
  parallelFor(targets.size(), jobs, [&](std::size_t i) {
    const auto& inst = *targets[i];
    auto& r = eval.instances[i];
    r.instanceId = inst.instanceId;
    r.maskedLength = inst.masked.size();
    r.bucket = lengthBucket(inst.level, r.maskedLength);
    const auto* p = predictions.find(inst.instanceId);
    r.predicted = p != nullptr;
    r.metrics = computeMetrics(p ? p->predictedTokens : TextSeq{}, inst.masked);
  });
  eval.aggregates = aggregate(eval.instances);
  return eval;
}

Comparison compare(const ModelEvaluation& a, const ModelEvaluation& b) {
  Comparison c;
  c.modelA = a.modelTag;
  c.modelB = b.modelTag;
  std::unordered_map<std::string, const InstanceResult*> byId;
  for (const auto& r : b.instances) byId.emplace(r.instanceId, &r);

  std::vector<double> levDiffs;
  for (const auto& ra : a.instances) {
    const auto it = byId.find(ra.instanceId);
    if (it == byId.end()) continue;
    const auto& rb = *it->second;
    const bool pa = ra.metrics.perfect;
    const bool pb = rb.metrics.perfect;
    if (pa && pb) {
      ++c.table.a;
    } else if (pa) {
      ++c.table.b;
    } else if (pb) {
      ++c.table.c;
    } else {
      ++c.table.d;
    }
    levDiffs.push_back(ra.metrics.levNorm - rb.metrics.levNorm);
  }

  c.oddsRatio = oddsRatio(c.table);
  try {
    c.mcnemar = mcnemar(c.table);
  } catch (const UndefinedTestError&) {
    c.status = "no discordance";
  }
  try {
    c.levWilcoxon = wilcoxonSignedRank(levDiffs);
  } catch (const UndefinedTestError&) {
  }
  return c;
}

std::vector<Comparison> compareModels(const std::vector<ModelEvaluation>& evaluations) {
  std::vector<Comparison> out;
  for (std::size_t i = 0; i < evaluations.size(); ++i) {
    for (std::size_t j = i + 1; j < evaluations.size(); ++j) out.push_back(compare(evaluations[i], evaluations[j]));
  }
  std::vector<double> ps;
  for (const auto& c : out) {
    if (c.mcnemar) ps.push_back(c.mcnemar->pValue);
  }
  const auto adjusted = benjaminiHochberg(ps);
  std::size_t k = 0;
  for (auto& c : out) {
    if (c.mcnemar) c.adjustedP = adjusted[k++];
  }
  return out;
}

EvaluationReport buildReport(const Dataset& dataset, const std::vector<PredictionSet>& sets, unsigned jobs) {
  if (dataset.empty()) throw Error("cannot evaluate an empty dataset");
  if (sets.empty()) throw Error("no prediction sets given");
  std::vector<const PredictionSet*> ptrs;
  for (const auto& s : sets) ptrs.push_back(&s);

  EvaluationReport report;
  ExclusionResult exclusion;
  if (sets.size() > 1) {
    exclusion = excludeMismatches(dataset, ptrs);
  } else {
    checkPredictionsAgainst(dataset, sets.front());
    for (const auto& inst : dataset.instances()) exclusion.shared.push_back(inst.instanceId);
  }
  report.excluded = exclusion.excluded;
  if (exclusion.shared.empty()) throw Error("every instance was excluded by tokenization mismatch");
  for (const auto& s : sets) report.models.push_back(evaluate(dataset, s, exclusion.shared, jobs));
  if (sets.size() > 1) report.comparisons = compareModels(report.models);
  return report;
}

namespace {

Json optionalNumber(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json toJson(const TestResult& t) {
  Json j = Json::object();
  j["statistic"] = t.statistic;
  j["p"] = t.pValue;
  j["small_sample"] = t.smallSample;
  return j;
}

Json toJson(const Aggregates& agg) {
  Json j = Json::object();
  j["count"] = agg.count;
  j["perfect"] = agg.perfect;
  j["perfect_rate"] = agg.perfectRate();
  j["missing"] = agg.missing;
  Json bleu = Json::object();
  for (std::size_t n = 0; n < 4; ++n) {
    Json entry = Json::object();
    entry["mean"] = optionalNumber(agg.meanBleu[n]);
    entry["count"] = agg.bleuCount[n];
    bleu["bleu" + std::to_string(n + 1)] = entry;
  }
  j["bleu"] = bleu;
  j["mean_levnorm"] = agg.meanLevNorm;
  Json buckets = Json::array();
  for (const auto& b : agg.buckets) {
    Json e = Json::object();
    e["bucket"] = b.bucket;
    e["count"] = b.count;
    e["perfect"] = b.perfect;
    e["perfect_rate"] = b.perfectRate();
    buckets.push_back(e);
  }
  j["buckets"] = buckets;
  return j;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width, bool right = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return right ? fill + s : s + fill;
}

std::string pValueText(double p) { return p < 0.001 ? std::string("<0.001") : fixed(p, 4); }

}  // namespace

Json toJson(const EvaluationReport& report) {
  Json j = Json::object();
  j["v"] = kFormatVersion;
  j["kind"] = "evaluation-report";
  j["config"] = report.config;
  j["excluded"] = report.excluded;
  Json models = Json::array();
  for (const auto& m : report.models) {
    Json mj = Json::object();
    mj["model"] = m.modelTag;
    mj["aggregates"] = toJson(m.aggregates);
    Json per = Json::array();
    for (const auto& r : m.instances) {
      Json rj = Json::object();
      rj["iid"] = r.instanceId;
      rj["length"] = r.maskedLength;
      rj["bucket"] = r.bucket;
      rj["predicted"] = r.predicted;
      rj["perfect"] = r.metrics.perfect;
      Json bleu = Json::array();
      for (const auto& b : r.metrics.bleu) bleu.push_back(optionalNumber(b));
      rj["bleu"] = bleu;
      rj["levnorm"] = r.metrics.levNorm;
      per.push_back(rj);
    }
    mj["instances"] = per;
    models.push_back(mj);
  }
  j["models"] = models;
  Json comps = Json::array();
  for (const auto& c : report.comparisons) {
    Json cj = Json::object();
    cj["model_a"] = c.modelA;
    cj["model_b"] = c.modelB;
    cj["table"] = {{"a", c.table.a}, {"b", c.table.b}, {"c", c.table.c}, {"d", c.table.d}};
    cj["status"] = c.status;
    cj["mcnemar"] = c.mcnemar ? toJson(*c.mcnemar) : Json(nullptr);
    if (c.oddsRatio) {
      cj["odds_ratio"] = {{"value", c.oddsRatio->ratio}, {"haldane", c.oddsRatio->haldaneCorrected}};
    } else {
      cj["odds_ratio"] = nullptr;
    }
    cj["p_bh"] = optionalNumber(c.adjustedP);
    cj["levnorm_wilcoxon"] = c.levWilcoxon ? toJson(*c.levWilcoxon) : Json(nullptr);
    comps.push_back(cj);
  }
  j["comparisons"] = comps;
  return j;
}

std::string renderSummary(const EvaluationReport& report) {
  std::ostringstream out;
  out << pad("model", 16) << pad("n", 8, true) << pad("perfect", 10, true);
  for (int n = 1; n <= 4; ++n) out << pad("BLEU-" + std::to_string(n), 9, true);
  out << pad("lev", 8, true) << '\n';
  for (const auto& m : report.models) {
    const auto& a = m.aggregates;
    out << pad(m.modelTag, 16) << pad(std::to_string(a.count), 8, true)
        << pad(fixed(100.0 * a.perfectRate(), 2) + "%", 10, true);
    for (const auto& b : a.meanBleu) out << pad(b ? fixed(*b, 3) : std::string("n/a"), 9, true);
    out << pad(fixed(a.meanLevNorm, 3), 8, true) << '\n';
  }

  for (const auto& m : report.models) {
    out << "\nperfect predictions by masked tokens: " << m.modelTag << '\n';
    out << pad("tokens", 8) << pad("n", 8, true) << pad("perfect", 9, true) << pad("rate", 10, true) << '\n';
    for (const auto& b : m.aggregates.buckets) {
      out << pad(std::to_string(b.bucket), 8) << pad(std::to_string(b.count), 8, true)
          << pad(std::to_string(b.perfect), 9, true) << pad(fixed(100.0 * b.perfectRate(), 2) + "%", 10, true) << '\n';
    }
  }

  if (!report.comparisons.empty()) {
    out << '\n'
        << pad("comparison", 28) << pad("both", 7, true) << pad("A only", 8, true) << pad("B only", 8, true)
        << pad("neither", 9, true) << pad("OR", 8, true) << pad("p", 9, true) << pad("p (BH)", 9, true) << '\n';
    for (const auto& c : report.comparisons) {
      out << pad(c.modelA + " vs " + c.modelB, 28) << pad(std::to_string(c.table.a), 7, true)
          << pad(std::to_string(c.table.b), 8, true) << pad(std::to_string(c.table.c), 8, true)
          << pad(std::to_string(c.table.d), 9, true)
          << pad(c.oddsRatio ? fixed(c.oddsRatio->ratio, 2) + (c.oddsRatio->haldaneCorrected ? "*" : "")
                             : std::string("n/a"),
                 8, true);
      if (c.mcnemar) {
        out << pad(pValueText(c.mcnemar->pValue), 9, true) << pad(pValueText(c.adjustedP.value_or(1.0)), 9, true);
      } else {
        out << "  " << c.status;
      }
      out << '\n';
    }
  }
  if (!report.excluded.empty()) {
    out << "\nexcluded for tokenization mismatch: " << report.excluded.size() << '\n';
  }
  return out.str();
}

std::string_view toString(LevBucket bucket) noexcept {
  switch (bucket) {
    case LevBucket::Low:
      return "(0,0.25)";
    case LevBucket::MidLow:
      return "[0.25,0.5)";
    case LevBucket::MidHigh:
      return "[0.5,0.75)";
    case LevBucket::High:
      return "[0.75,1]";
  }
  return "";
}

std::optional<LevBucket> levBucket(double levNorm) noexcept {
  if (!(levNorm > 0.0) || levNorm > 1.0) return std::nullopt;
  if (levNorm < 0.25) return LevBucket::Low;
  if (levNorm < 0.5) return LevBucket::MidLow;
  if (levNorm < 0.75) return LevBucket::MidHigh;
  return LevBucket::High;
}

ReviewSample sampleNonPerfect(const ModelEvaluation& evaluation, const Dataset& dataset,
                              const PredictionSet& predictions, std::uint64_t seed, std::size_t perBucket) {
  std::array<std::vector<std::size_t>, 4> members;
  for (std::size_t i = 0; i < evaluation.instances.size(); ++i) {
    const auto& r = evaluation.instances[i];
    if (r.metrics.perfect) continue;
    if (const auto b = levBucket(r.metrics.levNorm)) members[static_cast<std::size_t>(*b)].push_back(i);
  }

  ReviewSample sample;
  for (std::size_t b = 0; b < members.size(); ++b) {
    auto chosen = members[b];
    const auto label = toString(static_cast<LevBucket>(b));
    if (chosen.size() < perBucket) {
      sample.warnings.push_back("bucket " + std::string(label) + " has " + std::to_string(chosen.size()) +
                                " non-perfect predictions, fewer than " + std::to_string(perBucket));
    } else {
      Rng rng(hashCombine(seed, b));
      rng.shuffle(chosen);
      chosen.resize(perBucket);
      std::sort(chosen.begin(), chosen.end());
    }
    for (std::size_t i : chosen) {
      const auto& r = evaluation.instances[i];
      const auto* inst = dataset.find(r.instanceId);
      if (!inst) throw Error("unknown instance " + r.instanceId);
      const auto* p = predictions.find(r.instanceId);
      sample.rows.push_back({r.instanceId, static_cast<LevBucket>(b), inst->prefix, inst->masked, inst->suffix,
                             p ? p->predictedTokens : TextSeq{}});
    }
  }
  return sample;
}

namespace {

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string joined(const TextSeq& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

std::string reviewSheetCsv(const ReviewSample& sample) {
  std::string out = "iid,bucket,prefix,masked,suffix,pred,judgment\n";
  for (const auto& r : sample.rows) {
    out += csvField(r.instanceId) + ',' + csvField(std::string(toString(r.bucket))) + ',' + csvField(joined(r.prefix)) +
           ',' + csvField(joined(r.masked)) + ',' + csvField(joined(r.suffix)) + ',' + csvField(joined(r.predicted)) +
           ",\n";
  }
  return out;
}

}  // namespace codemask
