#include "codemask/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <numeric>

#include "codemask/error.hpp"
#include "codemask/jsonl.hpp"
#include "codemask/lexer.hpp"
#include "codemask/parallel.hpp"
#include "codemask/random.hpp"

namespace codemask {

namespace fs = std::filesystem;

namespace {

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct PendingMethod {
  std::string id;
  std::string domain;
  std::string code;
};

void lexAll(std::vector<PendingMethod>& pending, unsigned jobs, IngestResult& result) {
  std::vector<std::optional<MethodRecord>> built(pending.size());
  std::vector<std::string> errors(pending.size());
  parallelFor(pending.size(), jobs, [&](std::size_t i) {
    try {
      built[i] = makeRecord(std::move(pending[i].id), std::move(pending[i].domain), std::move(pending[i].code));
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < built.size(); ++i) {
    if (built[i]) {
      result.records.push_back(std::move(*built[i]));
    } else {
      ++result.skipped;
      result.diagnostics.push_back("method " + std::to_string(i + 1) + ": " + errors[i]);
    }
  }
}

}  // namespace

MethodRecord makeRecord(std::string methodId, std::string domainTag, std::string code) {
  MethodRecord r;
  r.rawTokens = lex(code);
  if (r.rawTokens.empty()) throw Error("method has no tokens");
  r.methodId = std::move(methodId);
  r.domainTag = std::move(domainTag);
  r.code = std::move(code);
  r.name = methodName(r.rawTokens).value_or("");
  r.lineMap = segmentLines(r.rawTokens);
  r.sourceLineCount = r.rawTokens.back().line - r.rawTokens.front().line + 1;
  return r;
}

void abstractRecord(MethodRecord& record, const IdiomTable& idioms) {
  auto result = abstractTokens(record.rawTokens, idioms);
  record.abstractTokens = std::move(result.tokens);
  record.abstractionMap = std::move(result.map);
}

IngestResult ingest(const fs::path& source, const std::string& defaultDomain, unsigned jobs) {
  IngestResult result;
  std::vector<PendingMethod> pending;

  if (fs::is_directory(source)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(source)) {
      if (entry.is_regular_file() && entry.path().extension() == ".java") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      const std::string rel = fs::relative(file, source).generic_string();
      auto extracted = extractMethods({readTextFile(file)});
      for (const auto& d : extracted.diagnostics) result.diagnostics.push_back(rel + ": " + d);
      for (std::size_t k = 0; k < extracted.methods.size(); ++k) {
        pending.push_back({rel + "#" + std::to_string(k + 1), defaultDomain, std::move(extracted.methods[k].source)});
      }
    }
  } else {
    readJsonl(
        source,
        [&](const Json& rec, std::size_t lineNo) {
          const auto where = source.string() + ":" + std::to_string(lineNo);
          try {
            checkFormatVersion(rec, where);
          } catch (const FormatVersionError&) {
            throw;
          } catch (const FormatError& e) {
            ++result.skipped;
            result.diagnostics.push_back(e.what());
            return;
          }
          const auto id = rec.find("id");
          const auto code = rec.find("code");
          if (id == rec.end() || !id->is_string() || code == rec.end() || !code->is_string()) {
            ++result.skipped;
            result.diagnostics.push_back(where + ": record needs string fields id and code");
            return;
          }
          std::string domain = defaultDomain;
          if (const auto d = rec.find("domain"); d != rec.end() && d->is_string()) domain = d->get<std::string>();
          pending.push_back({id->get<std::string>(), std::move(domain), code->get<std::string>()});
        },
        [&](std::size_t lineNo, const std::string&) {
          ++result.skipped;
          result.diagnostics.push_back(source.string() + ":" + std::to_string(lineNo) + ": malformed JSON");
        });
  }
  lexAll(pending, jobs, result);
  return result;
}

bool passesFilter(const MethodRecord& record, const FilterOptions& options) {
  if (record.sourceLineCount < options.minLines) return false;
  if (record.rawTokens.size() > options.maxTokens) return false;
  if (record.name == "toString") return false;
  if (lowercase(record.name).find("test") != std::string::npos) return false;
  try {
    findBlocks(record.rawTokens);
  } catch (const StructureError&) {
    return false;
  }
  return true;
}

std::vector<MethodRecord> filterRecords(std::vector<MethodRecord> records, const FilterOptions& options) {
  std::erase_if(records, [&](const MethodRecord& r) { return !passesFilter(r, options); });
  return records;
}

std::string_view toString(Representation r) noexcept { return r == Representation::Raw ? "raw" : "abstract"; }

std::optional<Representation> representationFromString(std::string_view name) noexcept {
  if (name == "raw") return Representation::Raw;
  if (name == "abstract") return Representation::Abstract;
  return std::nullopt;
}

std::vector<MethodRecord> dedup(std::vector<MethodRecord> records, Representation representation, std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (representation == Representation::Abstract && !r.abstracted()) {
      throw Error("abstract dedup needs abstracted records (" + r.methodId + ")");
    }
    const TokenSeq& tokens = representation == Representation::Raw ? r.rawTokens : r.abstractTokens;
    std::string key;
    for (const auto& t : tokens) {
      key += t.text;
      key.push_back('\x1f');
    }
    groups[key].push_back(i);
  }
  std::vector<bool> keep(records.size(), false);
  for (auto& [key, members] : groups) {
    // Canonical member order so the draw does not depend on input order.
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return records[a].methodId < records[b].methodId; });
    Rng rng(hashCombine(seed, fnv1a64(key)));
    keep[members[rng.below(members.size())]] = true;
  }
  std::vector<MethodRecord> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) out.push_back(std::move(records[i]));
  }
  return out;
}

std::string_view toString(Split s) noexcept {
  switch (s) {
    case Split::Train:
      return "train";
    case Split::Eval:
      return "eval";
    case Split::Test:
      return "test";
  }
  return "unknown";
}

std::optional<Split> splitFromString(std::string_view name) noexcept {
  if (name == "train") return Split::Train;
  if (name == "eval") return Split::Eval;
  if (name == "test") return Split::Test;
  return std::nullopt;
}

SplitCounts splitSizes(std::size_t methods) {
  SplitCounts c;
  c.train = methods * 8 / 10;
  c.eval = methods / 10;
  c.test = methods - c.train - c.eval;
  return c;
}

std::vector<SplitAssignment> splitMethods(std::vector<std::string> methodIds, std::uint64_t seed) {
  if (methodIds.size() < 10) throw Error("split needs at least 10 methods, got " + std::to_string(methodIds.size()));
  std::sort(methodIds.begin(), methodIds.end());
  if (std::adjacent_find(methodIds.begin(), methodIds.end()) != methodIds.end()) {
    throw Error("split: duplicate method id");
  }
  Rng rng(hashCombine(seed, fnv1a64("split")));
  rng.shuffle(methodIds);
  const SplitCounts sizes = splitSizes(methodIds.size());
  std::vector<SplitAssignment> out;
  out.reserve(methodIds.size());
  for (std::size_t i = 0; i < methodIds.size(); ++i) {
    const Split s = i < sizes.train ? Split::Train : (i < sizes.train + sizes.eval ? Split::Eval : Split::Test);
    out.push_back({std::move(methodIds[i]), s});
  }
  return out;
}

std::vector<std::size_t> cappedIndices(std::size_t count, long long cap, std::uint64_t seed) {
  if (cap <= 0) throw Error("cap must be positive");
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (count <= static_cast<std::size_t>(cap)) return idx;
  Rng rng(hashCombine(seed, fnv1a64("cap")));
  rng.shuffle(idx);
  idx.resize(static_cast<std::size_t>(cap));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace codemask
