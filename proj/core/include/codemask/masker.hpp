#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codemask/corpus.hpp"
#include "codemask/structure.hpp"

namespace codemask {

enum class MaskLevel { Token, Construct, Block };
std::string_view toString(MaskLevel level) noexcept;
std::optional<MaskLevel> maskLevelFromString(std::string_view name) noexcept;

inline constexpr std::string_view kMaskSentinel = "<MASK>";
inline constexpr std::size_t kMaxMaskedTokens = 10;
inline constexpr int kMaxBlockStatements = 2;

// Where in the method the hidden span sits. `start`/`end` are the half-open
// token range of the masked span; the other fields depend on the level.
struct MaskSite {
  MaskLevel level = MaskLevel::Token;
  std::size_t start = 0;
  std::size_t end = 0;
  int line = 0;                            // token level
  std::optional<ConstructKind> construct;  // construct level
  int statementCount = 0;                  // block level

  friend bool operator==(const MaskSite&, const MaskSite&) = default;
};

struct MaskedInstance {
  std::string instanceId;
  std::string methodId;
  MaskLevel level = MaskLevel::Token;
  Representation representation = Representation::Raw;
  TextSeq prefix;
  TextSeq masked;
  TextSeq suffix;
  MaskSite site;

  std::size_t methodLength() const noexcept { return prefix.size() + masked.size() + suffix.size(); }
  TextSeq methodTokens() const;
};

/// |masked| must not exceed |prefix| + |suffix|.
bool satisfiesMaskRatio(std::size_t maskedCount, std::size_t methodLength) noexcept;

/// Number of trailing tokens hidden on a line of n > 1 tokens: uniform in
/// 1..n-1, capped at 10, as a pure function of (seed, methodId, line).
std::size_t tokenMaskLength(std::uint64_t seed, std::string_view methodId, int line, std::size_t n);

/// Candidate sites before the mask-ratio rule, identical for both
/// representations of a record.
std::vector<MaskSite> tokenSites(const MethodRecord& record, std::uint64_t seed);
std::vector<MaskSite> constructSites(const MethodRecord& record);
std::vector<MaskSite> blockSites(const MethodRecord& record);

std::vector<MaskedInstance> maskTokens(const MethodRecord& record, std::uint64_t seed, Representation representation);
std::vector<MaskedInstance> maskConstructs(const MethodRecord& record, Representation representation);
std::vector<MaskedInstance> maskBlocks(const MethodRecord& record, Representation representation);

std::vector<MaskedInstance> maskMethod(const MethodRecord& record, MaskLevel level, Representation representation,
                                       std::uint64_t seed);

/// Masks every record (parallel over records) and concatenates the results in
/// record order.
std::vector<MaskedInstance> maskCorpus(const std::vector<MethodRecord>& records, MaskLevel level,
                                       Representation representation, std::uint64_t seed, unsigned jobs = 1);

/// prefix ++ [<MASK>] ++ suffix.
TextSeq renderInput(const MaskedInstance& instance);

std::string instanceIdFor(std::string_view methodId, const MaskSite& site);

}  // namespace codemask
