#include "codemask/masker.hpp"

#include <algorithm>

#include "codemask/error.hpp"
#include "codemask/parallel.hpp"
#include "codemask/random.hpp"

namespace codemask {

namespace {

const TokenSeq& tokensFor(const MethodRecord& record, Representation representation) {
  if (representation == Representation::Raw) return record.rawTokens;
  if (!record.abstracted()) throw Error("record " + record.methodId + " has not been abstracted");
  return record.abstractTokens;
}

std::vector<MaskedInstance> materialize(const MethodRecord& record, const std::vector<MaskSite>& sites,
                                        Representation representation) {
  const TokenSeq& tokens = tokensFor(record, representation);
  std::vector<MaskedInstance> out;
  for (const auto& site : sites) {
    if (!satisfiesMaskRatio(site.end - site.start, tokens.size())) continue;
    MaskedInstance inst;
    inst.instanceId = instanceIdFor(record.methodId, site);
    inst.methodId = record.methodId;
    inst.level = site.level;
    inst.representation = representation;
    inst.site = site;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      TextSeq& part = i < site.start ? inst.prefix : (i < site.end ? inst.masked : inst.suffix);
      part.push_back(tokens[i].text);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

std::string_view toString(MaskLevel level) noexcept {
  switch (level) {
    case MaskLevel::Token:
      return "token";
    case MaskLevel::Construct:
      return "construct";
    case MaskLevel::Block:
      return "block";
  }
  return "unknown";
}

std::optional<MaskLevel> maskLevelFromString(std::string_view name) noexcept {
  if (name == "token") return MaskLevel::Token;
  if (name == "construct") return MaskLevel::Construct;
  if (name == "block") return MaskLevel::Block;
  return std::nullopt;
}

TextSeq MaskedInstance::methodTokens() const {
  TextSeq all = prefix;
  all.insert(all.end(), masked.begin(), masked.end());
  all.insert(all.end(), suffix.begin(), suffix.end());
  return all;
}

bool satisfiesMaskRatio(std::size_t maskedCount, std::size_t methodLength) noexcept {
  return maskedCount <= methodLength - maskedCount;
}

std::size_t tokenMaskLength(std::uint64_t seed, std::string_view methodId, int line, std::size_t n) {
  const auto x = keyedUniform(seed, methodId, static_cast<std::uint64_t>(line), 1, n - 1);
  return std::min<std::size_t>(static_cast<std::size_t>(x), kMaxMaskedTokens);
}

std::vector<MaskSite> tokenSites(const MethodRecord& record, std::uint64_t seed) {
  std::vector<MaskSite> sites;
  for (const auto& group : record.lineMap) {
    if (group.size() <= 1) continue;
    const std::size_t x = tokenMaskLength(seed, record.methodId, group.line, group.size());
    MaskSite site;
    site.level = MaskLevel::Token;
    site.start = group.end - x;
    site.end = group.end;
    site.line = group.line;
    sites.push_back(site);
  }
  return sites;
}

std::vector<MaskSite> constructSites(const MethodRecord& record) {
  std::vector<MaskSite> sites;
  for (const auto& span : findConstructs(record.rawTokens)) {
    if (span.size() > kMaxMaskedTokens) continue;
    MaskSite site;
    site.level = MaskLevel::Construct;
    site.start = span.start;
    site.end = span.end;
    site.construct = span.kind;
    sites.push_back(site);
  }
  return sites;
}

std::vector<MaskSite> blockSites(const MethodRecord& record) {
  std::vector<MaskSite> sites;
  for (const auto& block : findBlocks(record.rawTokens)) {
    if (block.statementCount > kMaxBlockStatements) continue;
    MaskSite site;
    site.level = MaskLevel::Block;
    site.start = block.start;
    site.end = block.end + 1;  // braces are part of the hidden span
    site.statementCount = block.statementCount;
    sites.push_back(site);
  }
  return sites;
}

std::vector<MaskedInstance> maskTokens(const MethodRecord& record, std::uint64_t seed, Representation representation) {
  return materialize(record, tokenSites(record, seed), representation);
}

std::vector<MaskedInstance> maskConstructs(const MethodRecord& record, Representation representation) {
  return materialize(record, constructSites(record), representation);
}

std::vector<MaskedInstance> maskBlocks(const MethodRecord& record, Representation representation) {
  return materialize(record, blockSites(record), representation);
}

std::vector<MaskedInstance> maskMethod(const MethodRecord& record, MaskLevel level, Representation representation,
                                       std::uint64_t seed) {
  switch (level) {
    case MaskLevel::Token:
      return maskTokens(record, seed, representation);
    case MaskLevel::Construct:
      return maskConstructs(record, representation);
    case MaskLevel::Block:
      return maskBlocks(record, representation);
  }
  return {};
}

std::vector<MaskedInstance> maskCorpus(const std::vector<MethodRecord>& records, MaskLevel level,
                                       Representation representation, std::uint64_t seed, unsigned jobs) {
  std::vector<std::vector<MaskedInstance>> perRecord(records.size());
  parallelFor(records.size(), jobs,
              [&](std::size_t i) { perRecord[i] = maskMethod(records[i], level, representation, seed); });
  std::vector<MaskedInstance> out;
  for (auto& batch : perRecord) {
    std::move(batch.begin(), batch.end(), std::back_inserter(out));
  }
  return out;
}

TextSeq renderInput(const MaskedInstance& instance) {
  TextSeq out = instance.prefix;
  out.emplace_back(kMaskSentinel);
  out.insert(out.end(), instance.suffix.begin(), instance.suffix.end());
  return out;
}

std::string instanceIdFor(std::string_view methodId, const MaskSite& site) {
  std::string id(methodId);
  id += "/";
  id += toString(site.level);
  id += "@" + std::to_string(site.start) + "-" + std::to_string(site.end);
  return id;
}

}  // namespace codemask
