#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "codemask/corpus.hpp"
#include "codemask/jsonl.hpp"
#include "codemask/masker.hpp"

namespace codemask {

// Methods file: {"v","id","domain","code"} plus "abstract" (token texts) and
// "map" once abstracted. Tokens are recovered by re-lexing "code".
Json toJson(const MethodRecord& record);
MethodRecord methodFromJson(const Json& j);
void writeMethods(const std::filesystem::path& file, const std::vector<MethodRecord>& records);
std::vector<MethodRecord> readMethods(const std::filesystem::path& file);

// Abstraction map sidecar: {"v","id","map":{placeholder: original}}.
void writeAbstractionMaps(const std::filesystem::path& file, const std::vector<MethodRecord>& records);
std::unordered_map<std::string, AbstractionMap> readAbstractionMaps(const std::filesystem::path& file);

// Split manifest: {"v","id","split"}.
void writeSplitManifest(const std::filesystem::path& file, const std::vector<SplitAssignment>& splits);
std::vector<SplitAssignment> readSplitManifest(const std::filesystem::path& file);

Json toJson(const MaskSite& site);
MaskSite siteFromJson(const Json& j, MaskLevel level);
Json toJson(const MaskedInstance& instance);
MaskedInstance instanceFromJson(const Json& j);

// Masked instances with an id index. Ids are unique.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<MaskedInstance> instances);

  const std::vector<MaskedInstance>& instances() const noexcept { return instances_; }
  std::size_t size() const noexcept { return instances_.size(); }
  bool empty() const noexcept { return instances_.empty(); }
  const MaskedInstance* find(const std::string& instanceId) const;
  std::optional<std::size_t> indexOf(const std::string& instanceId) const;

 private:
  std::vector<MaskedInstance> instances_;
  std::unordered_map<std::string, std::size_t> index_;
};

void writeDataset(const std::filesystem::path& file, const std::vector<MaskedInstance>& instances);
Dataset readDataset(const std::filesystem::path& file);

struct PredictionRecord {
  std::string instanceId;
  std::string modelTag;
  TextSeq predictedTokens;
  std::optional<std::size_t> referenceLength;  // the model's own tokenization of the masked span

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

Json toJson(const PredictionRecord& record);
PredictionRecord predictionFromJson(const Json& j);

// All predictions of one model, keyed by instance id.
class PredictionSet {
 public:
  explicit PredictionSet(std::string modelTag = {}) : modelTag_(std::move(modelTag)) {}

  const std::string& modelTag() const noexcept { return modelTag_; }
  /// Throws FormatError on a second record for the same instance.
  void add(PredictionRecord record);
  const PredictionRecord* find(const std::string& instanceId) const;
  const std::vector<PredictionRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

 private:
  std::string modelTag_;
  std::vector<PredictionRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

void writePredictions(const std::filesystem::path& file, const std::vector<PredictionRecord>& records);

/// Groups a prediction file by model tag, in order of first appearance.
std::vector<PredictionSet> readPredictions(const std::filesystem::path& file);

/// Throws Error naming the first prediction whose instance is not in the dataset.
void checkPredictionsAgainst(const Dataset& dataset, const PredictionSet& predictions);

}  // namespace codemask
