#include "codemask/formats.hpp"

#include "codemask/error.hpp"

namespace codemask {

namespace fs = std::filesystem;

namespace {

Json versioned() {
  Json j = Json::object();
  j["v"] = kFormatVersion;
  return j;
}

TextSeq textsFromJson(const Json& j) {
  if (!j.is_array()) throw FormatError("expected an array of token texts");
  TextSeq out;
  out.reserve(j.size());
  for (const auto& t : j) out.push_back(t.get<std::string>());
  return out;
}

Json mapToJson(const AbstractionMap& map) {
  Json m = Json::object();
  for (const auto& [placeholder, original] : map.entries) m[placeholder] = original;
  return m;
}

AbstractionMap mapFromJson(const Json& j) {
  if (!j.is_object()) throw FormatError("abstraction map must be an object");
  AbstractionMap map;
  for (const auto& [placeholder, original] : j.items()) {
    map.entries.emplace_back(placeholder, original.get<std::string>());
  }
  return map;
}

// Reads every record of a JSONL file through `convert`, turning JSON type
// errors into FormatError with the file position.
template <typename Convert>
void readRecords(const fs::path& file, Convert&& convert) {
  readJsonl(file, [&](const Json& j, std::size_t line) {
    const std::string where = file.string() + ":" + std::to_string(line);
    checkFormatVersion(j, where);
    try {
      convert(j);
    } catch (const FormatVersionError&) {
      throw;
    } catch (const Json::exception& e) {
      throw FormatError(where + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError(where + ": " + e.what());
    }
  });
}

}  // namespace

Json toJson(const MethodRecord& record) {
  Json j = versioned();
  j["id"] = record.methodId;
  j["domain"] = record.domainTag;
  j["code"] = record.code;
  if (record.abstracted()) {
    j["abstract"] = texts(record.abstractTokens);
    j["map"] = mapToJson(record.abstractionMap);
  }
  return j;
}

MethodRecord methodFromJson(const Json& j) {
  MethodRecord r = makeRecord(j.at("id").get<std::string>(), j.value("domain", std::string("java")),
                              j.at("code").get<std::string>());
  if (j.contains("abstract")) {
    const TextSeq abstractTexts = textsFromJson(j.at("abstract"));
    if (abstractTexts.size() != r.rawTokens.size()) {
      throw FormatError("method " + r.methodId + ": abstract tokens do not align with code");
    }
    r.abstractTokens = r.rawTokens;
    for (std::size_t i = 0; i < abstractTexts.size(); ++i) {
      if (abstractTexts[i] == r.rawTokens[i].text) continue;
      r.abstractTokens[i].text = abstractTexts[i];
      r.abstractTokens[i].kind = TokenKind::Placeholder;
    }
    r.abstractionMap = mapFromJson(j.at("map"));
  }
  return r;
}

void writeMethods(const fs::path& file, const std::vector<MethodRecord>& records) {
  JsonlWriter out(file);
  for (const auto& r : records) out.write(toJson(r));
}

std::vector<MethodRecord> readMethods(const fs::path& file) {
  std::vector<MethodRecord> records;
  readRecords(file, [&](const Json& j) { records.push_back(methodFromJson(j)); });
  return records;
}

void writeAbstractionMaps(const fs::path& file, const std::vector<MethodRecord>& records) {
  JsonlWriter out(file);
  for (const auto& r : records) {
    Json j = versioned();
    j["id"] = r.methodId;
    j["map"] = mapToJson(r.abstractionMap);
    out.write(j);
  }
}

std::unordered_map<std::string, AbstractionMap> readAbstractionMaps(const fs::path& file) {
  std::unordered_map<std::string, AbstractionMap> maps;
  readRecords(file, [&](const Json& j) { maps[j.at("id").get<std::string>()] = mapFromJson(j.at("map")); });
  return maps;
}

void writeSplitManifest(const fs::path& file, const std::vector<SplitAssignment>& splits) {
  JsonlWriter out(file);
  for (const auto& s : splits) {
    Json j = versioned();
    j["id"] = s.methodId;
    j["split"] = std::string(toString(s.split));
    out.write(j);
  }
}

std::vector<SplitAssignment> readSplitManifest(const fs::path& file) {
  std::vector<SplitAssignment> splits;
  readRecords(file, [&](const Json& j) {
    const auto split = splitFromString(j.at("split").get<std::string>());
    if (!split) throw FormatError("unknown split " + j.at("split").dump());
    splits.push_back({j.at("id").get<std::string>(), *split});
  });
  return splits;
}

Json toJson(const MaskSite& site) {
  Json j = Json::object();
  j["start"] = site.start;
  j["end"] = site.end;
  switch (site.level) {
    case MaskLevel::Token:
      j["line"] = site.line;
      break;
    case MaskLevel::Construct:
      if (site.construct) j["construct"] = std::string(toString(*site.construct));
      break;
    case MaskLevel::Block:
      j["statements"] = site.statementCount;
      break;
  }
  return j;
}

MaskSite siteFromJson(const Json& j, MaskLevel level) {
  MaskSite site;
  site.level = level;
  site.start = j.at("start").get<std::size_t>();
  site.end = j.at("end").get<std::size_t>();
  if (site.end < site.start) throw FormatError("site end precedes start");
  site.line = j.value("line", 0);
  if (j.contains("construct")) {
    site.construct = constructKindFromString(j.at("construct").get<std::string>());
    if (!site.construct) throw FormatError("unknown construct " + j.at("construct").dump());
  }
  site.statementCount = j.value("statements", 0);
  return site;
}

Json toJson(const MaskedInstance& instance) {
  Json j = versioned();
  j["iid"] = instance.instanceId;
  j["mid"] = instance.methodId;
  j["level"] = std::string(toString(instance.level));
  j["repr"] = std::string(toString(instance.representation));
  j["prefix"] = instance.prefix;
  j["masked"] = instance.masked;
  j["suffix"] = instance.suffix;
  j["site"] = toJson(instance.site);
  return j;
}

MaskedInstance instanceFromJson(const Json& j) {
  MaskedInstance inst;
  inst.instanceId = j.at("iid").get<std::string>();
  inst.methodId = j.at("mid").get<std::string>();
  const auto level = maskLevelFromString(j.at("level").get<std::string>());
  if (!level) throw FormatError("unknown level " + j.at("level").dump());
  const auto repr = representationFromString(j.at("repr").get<std::string>());
  if (!repr) throw FormatError("unknown representation " + j.at("repr").dump());
  inst.level = *level;
  inst.representation = *repr;
  inst.prefix = textsFromJson(j.at("prefix"));
  inst.masked = textsFromJson(j.at("masked"));
  inst.suffix = textsFromJson(j.at("suffix"));
  inst.site = siteFromJson(j.at("site"), *level);
  return inst;
}

Dataset::Dataset(std::vector<MaskedInstance> instances) : instances_(std::move(instances)) {
  index_.reserve(instances_.size());
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    if (!index_.emplace(instances_[i].instanceId, i).second) {
      throw FormatError("duplicate instance id " + instances_[i].instanceId);
    }
  }
}

const MaskedInstance* Dataset::find(const std::string& instanceId) const {
  const auto it = index_.find(instanceId);
  return it == index_.end() ? nullptr : &instances_[it->second];
}

std::optional<std::size_t> Dataset::indexOf(const std::string& instanceId) const {
  const auto it = index_.find(instanceId);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void writeDataset(const fs::path& file, const std::vector<MaskedInstance>& instances) {
  JsonlWriter out(file);
  for (const auto& inst : instances) out.write(toJson(inst));
}

Dataset readDataset(const fs::path& file) {
  std::vector<MaskedInstance> instances;
  readRecords(file, [&](const Json& j) { instances.push_back(instanceFromJson(j)); });
  return Dataset(std::move(instances));
}

Json toJson(const PredictionRecord& record) {
  Json j = versioned();
  j["iid"] = record.instanceId;
  j["model"] = record.modelTag;
  j["pred"] = record.predictedTokens;
  if (record.referenceLength) j["reflen"] = *record.referenceLength;
  return j;
}

PredictionRecord predictionFromJson(const Json& j) {
  PredictionRecord r;
  r.instanceId = j.at("iid").get<std::string>();
  r.modelTag = j.at("model").get<std::string>();
  r.predictedTokens = textsFromJson(j.at("pred"));
  if (j.contains("reflen") && !j.at("reflen").is_null()) r.referenceLength = j.at("reflen").get<std::size_t>();
  return r;
}

void PredictionSet::add(PredictionRecord record) {
  if (!index_.emplace(record.instanceId, records_.size()).second) {
    throw FormatError("duplicate prediction for " + record.instanceId + " by model " + modelTag_);
  }
  records_.push_back(std::move(record));
}

const PredictionRecord* PredictionSet::find(const std::string& instanceId) const {
  const auto it = index_.find(instanceId);
  return it == index_.end() ? nullptr : &records_[it->second];
}

void writePredictions(const fs::path& file, const std::vector<PredictionRecord>& records) {
  JsonlWriter out(file);
  for (const auto& r : records) out.write(toJson(r));
}

std::vector<PredictionSet> readPredictions(const fs::path& file) {
  std::vector<PredictionSet> sets;
  std::unordered_map<std::string, std::size_t> byModel;
  readRecords(file, [&](const Json& j) {
    auto record = predictionFromJson(j);
    auto [it, inserted] = byModel.emplace(record.modelTag, sets.size());
    if (inserted) sets.emplace_back(record.modelTag);
    sets[it->second].add(std::move(record));
  });
  return sets;
}

void checkPredictionsAgainst(const Dataset& dataset, const PredictionSet& predictions) {
  for (const auto& r : predictions.records()) {
    if (!dataset.find(r.instanceId)) {
      throw Error("prediction by model " + predictions.modelTag() + " for unknown instance " + r.instanceId);
    }
  }
}

}  // namespace codemask
