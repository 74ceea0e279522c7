#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <thread>
#include <unordered_map>

#include <CLI11.hpp>

#include "codemask/bpe.hpp"
#include "codemask/corpus.hpp"
#include "codemask/error.hpp"
#include "codemask/eval.hpp"
#include "codemask/formats.hpp"
#include "codemask/lexer.hpp"
#include "codemask/masker.hpp"
#include "codemask/ngram.hpp"
#include "codemask/parallel.hpp"

namespace codemask::cli {

namespace {

namespace fs = std::filesystem;

class MissingFileError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

void requireFile(const fs::path& path) {
  if (!fs::exists(path)) throw MissingFileError("no such file: " + path.string());
}

fs::path configPathFor(fs::path out) {
  if (!out.has_filename()) out = out.parent_path();
  return fs::path(out.string() + ".config.json");
}

// Configs name their inputs and outputs relative to their own directory.
std::string configRelative(const fs::path& p, const fs::path& out) {
  const fs::path base = fs::absolute(configPathFor(out)).parent_path();
  return fs::absolute(p).lexically_normal().lexically_relative(base).generic_string();
}

Json configRelative(const std::vector<std::string>& paths, const fs::path& out) {
  Json j = Json::array();
  for (const auto& p : paths) j.push_back(configRelative(p, out));
  return j;
}

void ensureParent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

TextSeq tokenTexts(const MethodRecord& record, Representation repr) {
  if (repr == Representation::Raw) return texts(record.rawTokens);
  if (!record.abstracted()) throw Error("method " + record.methodId + " has not been abstracted");
  return texts(record.abstractTokens);
}

Representation parseRepr(const std::string& name) {
  const auto repr = representationFromString(name);
  if (!repr) throw UsageError("unknown representation '" + name + "' (raw|abstract)");
  return *repr;
}

MaskLevel parseLevel(const std::string& name) {
  const auto level = maskLevelFromString(name);
  if (!level) throw UsageError("unknown level '" + name + "' (token|construct|block)");
  return *level;
}

// Keeps the records of one split when a manifest is given.
std::vector<MethodRecord> selectSplit(std::vector<MethodRecord> records, const std::string& manifest,
                                      const std::string& splitName) {
  if (manifest.empty()) return records;
  requireFile(manifest);
  const auto split = splitFromString(splitName);
  if (!split) throw UsageError("unknown split '" + splitName + "' (train|eval|test)");
  std::set<std::string> keep;
  for (const auto& a : readSplitManifest(manifest)) {
    if (a.split == *split) keep.insert(a.methodId);
  }
  std::erase_if(records, [&](const MethodRecord& r) { return !keep.contains(r.methodId); });
  return records;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  Json config(const std::string& command) const {
    Json j = Json::object();
    j["v"] = kFormatVersion;
    j["command"] = command;
    j["seed"] = seed;
    return j;
  }
};

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string source;
  std::string domain = "java";
  std::string out;
};

void runIngest(const Context& ctx, const IngestArgs& a) {
  requireFile(a.source);
  auto result = ingest(a.source, a.domain, ctx.jobs);
  for (const auto& d : result.diagnostics) ctx.err << "warning: " << d << '\n';
  ensureParent(a.out);
  writeMethods(a.out, result.records);
  Json cfg = ctx.config("ingest");
  cfg["source"] = configRelative(a.source, a.out);
  cfg["domain"] = a.domain;
  cfg["out"] = configRelative(a.out, a.out);
  writeJsonFile(configPathFor(a.out), cfg);
  ctx.out << "ingested " << result.records.size() << " methods, skipped " << result.skipped << '\n';
}

// ---------------------------------------------------------------- filter

struct FilterArgs {
  std::string methods;
  int minLines = 3;
  std::size_t maxTokens = 100;
  std::string out;
};

void runFilter(const Context& ctx, const FilterArgs& a) {
  requireFile(a.methods);
  auto records = readMethods(a.methods);
  const std::size_t before = records.size();
  records = filterRecords(std::move(records), {a.minLines, a.maxTokens});
  const std::size_t filtered = records.size();
  records = dedup(std::move(records), Representation::Raw, ctx.seed);
  ensureParent(a.out);
  writeMethods(a.out, records);
  Json cfg = ctx.config("filter");
  cfg["methods"] = configRelative(a.methods, a.out);
  cfg["min_lines"] = a.minLines;
  cfg["max_tokens"] = a.maxTokens;
  cfg["dedup"] = "raw";
  cfg["out"] = configRelative(a.out, a.out);
  writeJsonFile(configPathFor(a.out), cfg);
  ctx.out << "kept " << records.size() << " of " << before << " methods (" << before - filtered << " filtered, "
          << filtered - records.size() << " duplicates)\n";
}

// ---------------------------------------------------------------- abstract

struct AbstractArgs {
  std::string methods;
  std::string idioms;
  std::string out;
};

void runAbstract(const Context& ctx, const AbstractArgs& a) {
  requireFile(a.methods);
  IdiomTable idioms = IdiomTable::defaults();
  if (!a.idioms.empty()) {
    requireFile(a.idioms);
    idioms = IdiomTable::load(a.idioms);
  }
  auto records = readMethods(a.methods);
  const std::size_t before = records.size();
  parallelFor(records.size(), ctx.jobs, [&](std::size_t i) { abstractRecord(records[i], idioms); });
  records = dedup(std::move(records), Representation::Abstract, ctx.seed);
  ensureParent(a.out);
  writeMethods(a.out, records);
  const fs::path mapFile = fs::path(a.out).replace_extension(".map.jsonl");
  writeAbstractionMaps(mapFile, records);
  Json cfg = ctx.config("abstract");
  cfg["methods"] = configRelative(a.methods, a.out);
  cfg["idioms"] = a.idioms.empty() ? Json(std::vector<std::string>(idioms.entries().begin(), idioms.entries().end()))
                                   : Json(configRelative(a.idioms, a.out));
  cfg["dedup"] = "abstract";
  cfg["out"] = configRelative(a.out, a.out);
  cfg["map"] = configRelative(mapFile, a.out);
  writeJsonFile(configPathFor(a.out), cfg);
  ctx.out << "abstracted " << records.size() << " methods (" << before - records.size() << " duplicates)\n";
}

// ---------------------------------------------------------------- mask

struct MaskArgs {
  std::string methods;
  std::string level;
  std::string repr = "raw";
  std::string out;
};

void runMask(const Context& ctx, const MaskArgs& a) {
  const MaskLevel level = parseLevel(a.level);
  const Representation repr = parseRepr(a.repr);
  requireFile(a.methods);
  const auto records = readMethods(a.methods);
  const auto instances = maskCorpus(records, level, repr, ctx.seed, ctx.jobs);
  ensureParent(a.out);
  writeDataset(a.out, instances);
  Json cfg = ctx.config("mask");
  cfg["methods"] = configRelative(a.methods, a.out);
  cfg["level"] = a.level;
  cfg["repr"] = a.repr;
  cfg["max_masked_tokens"] = kMaxMaskedTokens;
  cfg["max_block_statements"] = kMaxBlockStatements;
  cfg["out"] = configRelative(a.out, a.out);
  writeJsonFile(configPathFor(a.out), cfg);
  ctx.out << "masked " << instances.size() << " instances from " << records.size() << " methods\n";
}

// ---------------------------------------------------------------- split

struct SplitArgs {
  std::string methods;
  std::vector<std::string> datasets;
  long long cap = 750000;
  std::string out;
};

void runSplit(const Context& ctx, const SplitArgs& a) {
  requireFile(a.methods);
  for (const auto& d : a.datasets) requireFile(d);
  if (a.cap <= 0) throw UsageError("--cap must be positive");
  const auto records = readMethods(a.methods);
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.methodId);
  const auto assignment = splitMethods(ids, ctx.seed);
  ensureParent(a.out);
  writeSplitManifest(a.out, assignment);

  std::unordered_map<std::string, Split> splitOf;
  for (const auto& s : assignment) splitOf.emplace(s.methodId, s.split);
  const SplitCounts counts = splitSizes(records.size());
  ctx.out << "split " << records.size() << " methods: " << counts.train << " train, " << counts.eval << " eval, "
          << counts.test << " test\n";

  Json outputs = Json::array();
  const fs::path dir = fs::path(a.out).parent_path();
  for (const auto& d : a.datasets) {
    const Dataset dataset = readDataset(d);
    std::array<std::vector<MaskedInstance>, 3> parts;
    for (const auto& inst : dataset.instances()) {
      const auto it = splitOf.find(inst.methodId);
      if (it == splitOf.end()) throw Error("instance " + inst.instanceId + " belongs to a method outside the manifest");
      parts[static_cast<std::size_t>(it->second)].push_back(inst);
    }
    const std::size_t uncapped = parts[0].size();
    parts[0] = capTraining(std::move(parts[0]), a.cap, ctx.seed);
    const std::string stem = fs::path(d).stem().string();
    for (std::size_t s = 0; s < parts.size(); ++s) {
      const fs::path file = dir / (stem + "." + std::string(toString(static_cast<Split>(s))) + ".jsonl");
      writeDataset(file, parts[s]);
      outputs.push_back(configRelative(file, a.out));
    }
    ctx.out << stem << ": " << parts[0].size() << " train";
    if (uncapped != parts[0].size()) ctx.out << " (capped from " << uncapped << ")";
    ctx.out << ", " << parts[1].size() << " eval, " << parts[2].size() << " test instances\n";
  }

  Json cfg = ctx.config("split");
  cfg["methods"] = configRelative(a.methods, a.out);
  cfg["datasets"] = configRelative(a.datasets, a.out);
  cfg["cap"] = a.cap;
  cfg["out"] = configRelative(a.out, a.out);
  cfg["outputs"] = outputs;
  writeJsonFile(configPathFor(a.out), cfg);
}

// ---------------------------------------------------------------- bpe-train

struct BpeArgs {
  std::string methods;
  std::string manifest;
  std::string split = "train";
  std::string repr = "raw";
  std::size_t vocabSize = 0;
  std::string out;
};

void runBpeTrain(const Context& ctx, const BpeArgs& a) {
  const Representation repr = parseRepr(a.repr);
  requireFile(a.methods);
  const auto records = selectSplit(readMethods(a.methods), a.manifest, a.split);
  std::vector<std::string> corpus;
  std::set<std::string> distinct;
  corpus.reserve(records.size());
  for (const auto& r : records) {
    const auto tokens = tokenTexts(r, repr);
    distinct.insert(tokens.begin(), tokens.end());
    corpus.push_back(detokenize(tokens));
  }
  const auto& specials = defaultSpecialTokens();
  std::size_t vocabSize = a.vocabSize;
  if (vocabSize == 0) {
    vocabSize = repr == Representation::Raw ? 50000 : 256 + specials.size() + distinct.size();
  }
  const BpeModel model = trainBpe(corpus, vocabSize, specials);
  fs::create_directories(a.out);
  model.save(a.out);
  Json cfg = ctx.config("bpe-train");
  cfg["methods"] = configRelative(a.methods, a.out);
  cfg["manifest"] = configRelative(a.manifest, a.out);
  cfg["split"] = a.split;
  cfg["repr"] = a.repr;
  cfg["vocab_size"] = vocabSize;
  cfg["merges"] = model.merges().size();
  cfg["out"] = configRelative(a.out, a.out);
  writeJsonFile(configPathFor(a.out), cfg);
  ctx.out << "trained " << model.merges().size() << " merges, vocabulary " << model.vocabSize() << '\n';
}

// ---------------------------------------------------------------- ngram-train

struct NgramTrainArgs {
  std::string methods;
  std::string manifest;
  std::string split = "train";
  std::string repr = "raw";
  NgramConfig config;
  std::string out;
};

void runNgramTrain(const Context& ctx, const NgramTrainArgs& a) {
  const Representation repr = parseRepr(a.repr);
  a.config.validate();
  requireFile(a.methods);
  const auto records = selectSplit(readMethods(a.methods), a.manifest, a.split);
  std::vector<TextSeq> sequences;
  sequences.reserve(records.size());
  for (const auto& r : records) sequences.push_back(tokenTexts(r, repr));
  const NgramModel model = trainNgram(sequences, a.config);
  ensureParent(a.out);
  model.save(a.out);
  Json cfg = ctx.config("ngram-train");
  cfg["methods"] = configRelative(a.methods, a.out);
  cfg["manifest"] = configRelative(a.manifest, a.out);
  cfg["split"] = a.split;
  cfg["repr"] = a.repr;
  cfg["order"] = a.config.order;
  cfg["lambda"] = a.config.lambda;
  cfg["cache_k"] = a.config.cacheK;
  cfg["out"] = configRelative(a.out, a.out);
  writeJsonFile(configPathFor(a.out), cfg);
  ctx.out << "trained order-" << a.config.order << " model on " << sequences.size() << " methods, vocabulary "
          << model.counts.vocab().size() << '\n';
}

// ---------------------------------------------------------------- ngram-predict

struct NgramPredictArgs {
  std::string model;
  std::string dataset;
  std::string cache;  // empty: none; "local": the instance's own context; else a methods file
  bool teacherContext = false;
  std::string modelTag = "ngram";
  std::optional<double> cacheK;
  std::string out;
};

void runNgramPredict(const Context& ctx, const NgramPredictArgs& a) {
  requireFile(a.model);
  requireFile(a.dataset);
  const bool fileCache = !a.cache.empty() && a.cache != "local";
  if (fileCache) requireFile(a.cache);

  NgramModel model = NgramModel::load(a.model);
  if (a.cacheK) {
    model.config.cacheK = *a.cacheK;
    model.config.validate();
  }
  const Dataset dataset = readDataset(a.dataset);

  // Instances grouped by method, so one cache serves every site of a method.
  std::vector<std::string> methodOrder;
  std::unordered_map<std::string, std::vector<std::size_t>> byMethod;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& mid = dataset.instances()[i].methodId;
    auto [it, inserted] = byMethod.try_emplace(mid);
    if (inserted) methodOrder.push_back(mid);
    it->second.push_back(i);
  }

  NgramCounts shared(model.config.order);
  std::unordered_map<std::string, TextSeq> cachedMethodTokens;
  if (fileCache) {
    for (const auto& r : readMethods(a.cache)) {
      if (!dataset.empty()) {
        auto tokens = tokenTexts(r, dataset.instances().front().representation);
        shared.addSequence(tokens);
        if (byMethod.contains(r.methodId)) cachedMethodTokens.emplace(r.methodId, std::move(tokens));
      }
    }
  }

  std::vector<PredictionRecord> records(dataset.size());
  parallelFor(methodOrder.size(), ctx.jobs, [&](std::size_t m) {
    const auto& indices = byMethod.at(methodOrder[m]);
    std::optional<NgramCounts> methodCache;
    if (fileCache) {
      methodCache = shared;
      if (const auto it = cachedMethodTokens.find(methodOrder[m]); it != cachedMethodTokens.end()) {
        NgramCounts own(model.config.order);
        own.addSequence(it->second);
        methodCache->subtract(own);
      }
    }
    for (std::size_t i : indices) {
      const auto& inst = dataset.instances()[i];
      std::optional<NgramCounts> cache = methodCache;
      if (!a.cache.empty()) {
        if (!cache) cache.emplace(model.config.order);
        cache->addSequence(inst.prefix);
        cache->addSequence(inst.suffix);
      }
      const NgramPredictor predictor(model, cache && !cache->empty() ? &*cache : nullptr);
      auto& rec = records[i];
      rec.instanceId = inst.instanceId;
      rec.modelTag = a.modelTag;
      rec.predictedTokens = predictor.span(inst.prefix, inst.masked.size(), a.teacherContext, &inst.masked);
      rec.referenceLength = inst.masked.size();
    }
  });

  ensureParent(a.out);
  writePredictions(a.out, records);
  Json cfg = ctx.config("ngram-predict");
  cfg["model"] = configRelative(a.model, a.out);
  cfg["dataset"] = configRelative(a.dataset, a.out);
  cfg["cache"] = a.cache.empty() ? Json("none") : Json(a.cache);
  cfg["cache_k"] = model.config.cacheK;
  cfg["teacher_context"] = a.teacherContext;
  cfg["model_tag"] = a.modelTag;
  cfg["out"] = configRelative(a.out, a.out);
  writeJsonFile(configPathFor(a.out), cfg);
  ctx.out << "predicted " << records.size() << " instances\n";
}

// ---------------------------------------------------------------- evaluate / compare

struct EvaluateArgs {
  std::string dataset;
  std::vector<std::string> predictions;
  std::string out;
};

std::vector<PredictionSet> loadPredictionSets(const std::vector<std::string>& files) {
  std::vector<PredictionSet> sets;
  std::set<std::string> tags;
  for (const auto& f : files) {
    requireFile(f);
    for (auto& s : readPredictions(f)) {
      if (!tags.insert(s.modelTag()).second) throw Error("model tag '" + s.modelTag() + "' appears in two files");
      sets.push_back(std::move(s));
    }
  }
  return sets;
}

void runEvaluate(const Context& ctx, const EvaluateArgs& a, const std::string& command, std::size_t minModels) {
  requireFile(a.dataset);
  const Dataset dataset = readDataset(a.dataset);
  const auto sets = loadPredictionSets(a.predictions);
  if (sets.size() < minModels) {
    throw UsageError(command + " needs predictions from at least " + std::to_string(minModels) + " models");
  }
  EvaluationReport report = buildReport(dataset, sets, ctx.jobs);
  Json cfg = ctx.config(command);
  cfg["dataset"] = configRelative(a.dataset, a.out);
  cfg["predictions"] = configRelative(a.predictions, a.out);
  Json models = Json::array();
  for (const auto& s : sets) models.push_back(s.modelTag());
  cfg["models"] = models;
  cfg["metrics"] = {{"bleu", "cumulative BLEU-1..4, clipped precision, brevity penalty, unsmoothed"},
                    {"levenshtein", "token edit distance / max length"},
                    {"missing_predictions", "scored as empty"},
                    {"exclusion", "declared reference-length mismatch"}};
  cfg["out"] = configRelative(a.out, a.out);
  report.config = cfg;

  ensureParent(a.out);
  writeJsonFile(a.out, toJson(report));
  const std::string summary = renderSummary(report);
  writeTextFile(fs::path(a.out).replace_extension(".txt"), summary);
  writeJsonFile(configPathFor(a.out), cfg);
  ctx.out << summary;
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string dataset;
  std::string predictions;
  std::string modelTag;
  std::size_t perBucket = 25;
  std::string out;
};

void runSample(const Context& ctx, const SampleArgs& a) {
  requireFile(a.dataset);
  requireFile(a.predictions);
  const Dataset dataset = readDataset(a.dataset);
  const auto sets = readPredictions(a.predictions);
  const PredictionSet* chosen = nullptr;
  if (a.modelTag.empty()) {
    if (sets.size() != 1) throw UsageError("prediction file holds several models; pick one with --model");
    chosen = &sets.front();
  } else {
    for (const auto& s : sets) {
      if (s.modelTag() == a.modelTag) chosen = &s;
    }
    if (!chosen) throw Error("no predictions for model '" + a.modelTag + "'");
  }
  const ModelEvaluation evaluation = evaluate(dataset, *chosen, {}, ctx.jobs);
  const ReviewSample sample = sampleNonPerfect(evaluation, dataset, *chosen, ctx.seed, a.perBucket);
  for (const auto& w : sample.warnings) ctx.err << "warning: " << w << '\n';
  ensureParent(a.out);
  writeTextFile(a.out, reviewSheetCsv(sample));
  Json cfg = ctx.config("sample");
  cfg["dataset"] = configRelative(a.dataset, a.out);
  cfg["predictions"] = configRelative(a.predictions, a.out);
  cfg["model"] = chosen->modelTag();
  cfg["per_bucket"] = a.perBucket;
  cfg["out"] = configRelative(a.out, a.out);
  writeJsonFile(configPathFor(a.out), cfg);
  ctx.out << "sampled " << sample.rows.size() << " non-perfect predictions\n";
}

// ---------------------------------------------------------------- driver

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        break;
      default:
        out += c;
    }
  }
  return out;
}

int fail(std::ostream& err, int code, const char* name, const std::string& msg) {
  err << "error: code=" << name << " msg=\"" << escape(msg) << "\"\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Masked code-completion benchmark toolkit for Java"};
  app.name("codemask");
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto addCommon = [&](CLI::App* sub, bool seeded) {
    if (seeded) sub->add_option("--seed", seed, "Seed for every random choice")->capture_default_str();
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  };

  IngestArgs ingestArgs;
  auto* ingestCmd = app.add_subcommand("ingest", "Read a JSONL corpus or a directory of .java files");
  ingestCmd->add_option("source", ingestArgs.source, "Corpus JSONL file or source directory")->required();
  ingestCmd->add_option("--domain", ingestArgs.domain, "Domain tag for directory input")->capture_default_str();
  ingestCmd->add_option("--out", ingestArgs.out, "Methods file to write")->required();
  addCommon(ingestCmd, false);

  FilterArgs filterArgs;
  auto* filterCmd = app.add_subcommand("filter", "Drop short, long, test and toString methods; raw dedup");
  filterCmd->add_option("methods", filterArgs.methods)->required();
  filterCmd->add_option("--min-lines", filterArgs.minLines)->capture_default_str();
  filterCmd->add_option("--max-tokens", filterArgs.maxTokens)->capture_default_str();
  filterCmd->add_option("--out", filterArgs.out)->required();
  addCommon(filterCmd, true);

  AbstractArgs abstractArgs;
  auto* abstractCmd = app.add_subcommand("abstract", "Abstract identifiers and literals; abstract dedup");
  abstractCmd->add_option("methods", abstractArgs.methods)->required();
  abstractCmd->add_option("--idioms", abstractArgs.idioms, "Idiom file, one per line");
  abstractCmd->add_option("--out", abstractArgs.out)->required();
  addCommon(abstractCmd, true);

  MaskArgs maskArgs;
  auto* maskCmd = app.add_subcommand("mask", "Build a masked dataset");
  maskCmd->add_option("methods", maskArgs.methods)->required();
  maskCmd->add_option("--level", maskArgs.level, "token|construct|block")->required();
  maskCmd->add_option("--repr", maskArgs.repr, "raw|abstract")->capture_default_str();
  maskCmd->add_option("--out", maskArgs.out)->required();
  addCommon(maskCmd, true);

  SplitArgs splitArgs;
  auto* splitCmd = app.add_subcommand("split", "Assign methods to train/eval/test and split datasets");
  splitCmd->add_option("methods", splitArgs.methods)->required();
  splitCmd->add_option("--dataset", splitArgs.datasets, "Masked dataset to split (repeatable)");
  splitCmd->add_option("--cap", splitArgs.cap, "Training instance cap")->capture_default_str();
  splitCmd->add_option("--out", splitArgs.out, "Split manifest to write")->required();
  addCommon(splitCmd, true);

  BpeArgs bpeArgs;
  auto* bpeCmd = app.add_subcommand("bpe-train", "Train a byte-level BPE model");
  bpeCmd->add_option("methods", bpeArgs.methods)->required();
  bpeCmd->add_option("--manifest", bpeArgs.manifest, "Restrict to one split of this manifest");
  bpeCmd->add_option("--split", bpeArgs.split)->capture_default_str();
  bpeCmd->add_option("--repr", bpeArgs.repr)->capture_default_str();
  bpeCmd->add_option("--vocab-size", bpeArgs.vocabSize, "0: 50000 for raw, the dataset vocabulary for abstract")
      ->capture_default_str();
  bpeCmd->add_option("--out", bpeArgs.out, "Model directory")->required();
  addCommon(bpeCmd, false);

  NgramTrainArgs trainArgs;
  auto* trainCmd = app.add_subcommand("ngram-train", "Count n-grams over training methods");
  trainCmd->add_option("methods", trainArgs.methods)->required();
  trainCmd->add_option("--manifest", trainArgs.manifest, "Restrict to one split of this manifest");
  trainCmd->add_option("--split", trainArgs.split)->capture_default_str();
  trainCmd->add_option("--repr", trainArgs.repr)->capture_default_str();
  trainCmd->add_option("--ngram-order", trainArgs.config.order)->capture_default_str();
  trainCmd->add_option("--lambda", trainArgs.config.lambda)->capture_default_str();
  trainCmd->add_option("--cache-k", trainArgs.config.cacheK)->capture_default_str();
  trainCmd->add_option("--out", trainArgs.out)->required();
  addCommon(trainCmd, false);

  NgramPredictArgs predictArgs;
  auto* predictCmd = app.add_subcommand("ngram-predict", "Predict every masked span of a dataset");
  predictCmd->add_option("model", predictArgs.model)->required();
  predictCmd->add_option("dataset", predictArgs.dataset)->required();
  predictCmd->add_option("--cache", predictArgs.cache,
                         "'local' (the instance's visible code) or a methods file (minus the instance's method)");
  predictCmd->add_flag("--teacher-context", predictArgs.teacherContext,
                       "Condition on the true masked tokens (leaks the answer)");
  predictCmd->add_option("--model-tag", predictArgs.modelTag)->capture_default_str();
  predictCmd->add_option("--cache-k", predictArgs.cacheK, "Override the model's cache constant");
  predictCmd->add_option("--out", predictArgs.out)->required();
  addCommon(predictCmd, false);

  EvaluateArgs evaluateArgs;
  auto* evaluateCmd = app.add_subcommand("evaluate", "Score prediction files against a dataset");
  evaluateCmd->add_option("dataset", evaluateArgs.dataset)->required();
  evaluateCmd->add_option("predictions", evaluateArgs.predictions)->required();
  evaluateCmd->add_option("--out", evaluateArgs.out, "Report JSON; a .txt summary is written beside it")->required();
  addCommon(evaluateCmd, false);

  EvaluateArgs compareArgs;
  auto* compareCmd = app.add_subcommand("compare", "Paired comparison of two or more models");
  compareCmd->add_option("dataset", compareArgs.dataset)->required();
  compareCmd->add_option("predictions", compareArgs.predictions)->required();
  compareCmd->add_option("--out", compareArgs.out)->required();
  addCommon(compareCmd, false);

  SampleArgs sampleArgs;
  auto* sampleCmd = app.add_subcommand("sample", "Stratified review sheet of non-perfect predictions");
  sampleCmd->add_option("dataset", sampleArgs.dataset)->required();
  sampleCmd->add_option("predictions", sampleArgs.predictions)->required();
  sampleCmd->add_option("--model", sampleArgs.modelTag);
  sampleCmd->add_option("--per-bucket", sampleArgs.perBucket)->capture_default_str();
  sampleCmd->add_option("--out", sampleArgs.out, "Review sheet CSV")->required();
  addCommon(sampleCmd, true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, kUsage, "usage", e.what());
  }

  const Context ctx{out, err, seed, jobs};
  try {
    if (ingestCmd->parsed())
      runIngest(ctx, ingestArgs);
    else if (filterCmd->parsed())
      runFilter(ctx, filterArgs);
    else if (abstractCmd->parsed())
      runAbstract(ctx, abstractArgs);
    else if (maskCmd->parsed())
      runMask(ctx, maskArgs);
    else if (splitCmd->parsed())
      runSplit(ctx, splitArgs);
    else if (bpeCmd->parsed())
      runBpeTrain(ctx, bpeArgs);
    else if (trainCmd->parsed())
      runNgramTrain(ctx, trainArgs);
    else if (predictCmd->parsed())
      runNgramPredict(ctx, predictArgs);
    else if (evaluateCmd->parsed())
      runEvaluate(ctx, evaluateArgs, "evaluate", 1);
    else if (compareCmd->parsed())
      runEvaluate(ctx, compareArgs, "compare", 2);
    else if (sampleCmd->parsed())
      runSample(ctx, sampleArgs);
  } catch (const UsageError& e) {
    return fail(err, kUsage, "usage", e.what());
  } catch (const MissingFileError& e) {
    return fail(err, kMissingFile, "missing-file", e.what());
  } catch (const FormatVersionError& e) {
    return fail(err, kVersionMismatch, "format-version", e.what());
  } catch (const Error& e) {
    return fail(err, kDataError, "data", e.what());
  } catch (const Json::exception& e) {
    return fail(err, kDataError, "data", e.what());
  } catch (const std::exception& e) {
    return fail(err, kInternal, "internal", e.what());
  }
  return kOk;
}

}  // namespace codemask::cli
