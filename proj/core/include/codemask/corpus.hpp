#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codemask/abstractor.hpp"
#include "codemask/structure.hpp"
#include "codemask/token.hpp"

namespace codemask {

struct MethodRecord {
  std::string methodId;
  std::string domainTag;
  std::string name;
  std::string code;
  TokenSeq rawTokens;
  TokenSeq abstractTokens;  // empty until abstracted
  AbstractionMap abstractionMap;
  std::vector<LineGroup> lineMap;
  int sourceLineCount = 0;

  bool abstracted() const noexcept { return abstractTokens.size() == rawTokens.size() && !rawTokens.empty(); }
};

/// Builds a record from method source. Throws LexError if the code does not
/// lex and Error if it contains no tokens.
MethodRecord makeRecord(std::string methodId, std::string domainTag, std::string code);

/// Fills abstractTokens/abstractionMap in place.
void abstractRecord(MethodRecord& record, const IdiomTable& idioms = IdiomTable::defaults());

struct IngestResult {
  std::vector<MethodRecord> records;
  std::size_t skipped = 0;
  std::vector<std::string> diagnostics;
};

/// Reads a JSONL corpus ({"id","domain","code"} per line) or a directory of
/// .java files (walked in sorted path order). Methods that fail to lex and
/// malformed records are skipped and counted. `jobs` bounds lexing workers.
IngestResult ingest(const std::filesystem::path& source, const std::string& defaultDomain = "java", unsigned jobs = 1);

struct FilterOptions {
  int minLines = 3;
  std::size_t maxTokens = 100;
};

/// Drops methods with fewer than minLines physical lines, a name containing
/// "test" (any case), the name "toString", or more than maxTokens tokens.
/// Methods with unbalanced braces are dropped as unparseable.
std::vector<MethodRecord> filterRecords(std::vector<MethodRecord> records, const FilterOptions& options = {});
bool passesFilter(const MethodRecord& record, const FilterOptions& options = {});

enum class Representation { Raw, Abstract };
std::string_view toString(Representation r) noexcept;
std::optional<Representation> representationFromString(std::string_view name) noexcept;

/// Keeps one seeded-random representative per group of records with equal
/// token-text sequences. Survivors keep their input order.
std::vector<MethodRecord> dedup(std::vector<MethodRecord> records, Representation representation, std::uint64_t seed);

enum class Split { Train, Eval, Test };
std::string_view toString(Split s) noexcept;
std::optional<Split> splitFromString(std::string_view name) noexcept;

struct SplitAssignment {
  std::string methodId;
  Split split;
};

struct SplitCounts {
  std::size_t train = 0;
  std::size_t eval = 0;
  std::size_t test = 0;
};

/// 80/10/10 with floor for train and eval; remainder to test.
SplitCounts splitSizes(std::size_t methods);

/// Seeded shuffle of the ids (canonicalized by sorting first), then
/// contiguous train/eval/test assignment. Throws Error below 10 methods.
std::vector<SplitAssignment> splitMethods(std::vector<std::string> methodIds, std::uint64_t seed);

/// Seeded subset of exactly `cap` items when there are more, preserving
/// relative order. Throws Error when cap <= 0.
template <typename T>
std::vector<T> capTraining(std::vector<T> items, long long cap, std::uint64_t seed);

std::vector<std::size_t> cappedIndices(std::size_t count, long long cap, std::uint64_t seed);

template <typename T>
std::vector<T> capTraining(std::vector<T> items, long long cap, std::uint64_t seed) {
  const auto keep = cappedIndices(items.size(), cap, seed);
  if (keep.size() == items.size()) return items;
  std::vector<T> out;
  out.reserve(keep.size());
  for (std::size_t k : keep) out.push_back(std::move(items[k]));
  return out;
}

}  // namespace codemask
