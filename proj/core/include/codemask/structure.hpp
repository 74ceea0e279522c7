#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codemask/token.hpp"

namespace codemask {

enum class ConstructKind { IfCondition, WhileCondition, ForControl, CallArguments, CatchParameter };

std::string_view toString(ConstructKind kind) noexcept;
std::optional<ConstructKind> constructKindFromString(std::string_view name) noexcept;

// Half-open token range [start, end) strictly inside a matched "(" ... ")".
struct ConstructSpan {
  ConstructKind kind;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - start; }
  friend bool operator==(const ConstructSpan&, const ConstructSpan&) = default;
};

// Closed range: start is the "{" index, end the matching "}" index.
struct BlockSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  int statementCount = 0;

  friend bool operator==(const BlockSpan&, const BlockSpan&) = default;
};

struct LineGroup {
  int line = 0;
  std::size_t begin = 0;  // token index range [begin, end)
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
};

struct ExtractedMethod {
  std::string name;
  TokenSeq tokens;     // positions relative to `source`
  std::string source;  // signature through closing brace
  int firstLine = 1;   // line of the first token in the enclosing file
};

struct ExtractionResult {
  std::vector<ExtractedMethod> methods;
  std::vector<std::string> diagnostics;
};

/// Locates method declarations in each file by the signature heuristic
/// `name ( ... ) [throws ...] {` and brace matching. Files that fail to lex or
/// have unbalanced braces are skipped with a diagnostic. Nested declarations
/// (inside a method body) are not reported separately.
ExtractionResult extractMethods(const std::vector<std::string>& sources);

/// Name of the method whose signature opens the token sequence: the
/// identifier right before the first top-level "(" that precedes the body.
std::optional<std::string> methodName(const TokenSeq& tokens);

/// Index of the matching closer for the opener at `open`, if any.
std::optional<std::size_t> matchDelimiter(const TokenSeq& tokens, std::size_t open);

std::vector<ConstructSpan> findConstructs(const TokenSeq& tokens);

/// Every balanced brace pair, ordered by opening brace. Throws
/// StructureError on unbalanced braces.
std::vector<BlockSpan> findBlocks(const TokenSeq& tokens);

/// Counts the top-level statements between tokens[open] == "{" and
/// tokens[close] == "}". Compound statements (if/else chains, loops,
/// try/catch/finally, nested blocks) count as one.
int countStatements(const TokenSeq& tokens, std::size_t open, std::size_t close);

/// Groups consecutive tokens by physical source line.
std::vector<LineGroup> segmentLines(const TokenSeq& tokens);

}  // namespace codemask
