#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace codemask {

enum class TokenKind {
  Identifier,
  Keyword,
  TypeKeyword,
  NumberLiteral,
  StringLiteral,
  CharLiteral,
  BooleanLiteral,
  NullLiteral,
  Operator,
  Separator,
  Annotation,
  Placeholder,
};

std::string_view toString(TokenKind kind) noexcept;
std::optional<TokenKind> tokenKindFromString(std::string_view name) noexcept;

struct Token {
  std::string text;
  TokenKind kind = TokenKind::Identifier;
  int line = 1;            // 1-based physical line of the first character
  std::size_t offset = 0;  // byte offset of the first character in the lexed text

  // Identity is (text, kind); position is provenance only.
  friend bool operator==(const Token& a, const Token& b) noexcept { return a.kind == b.kind && a.text == b.text; }

  bool is(std::string_view t) const noexcept { return text == t; }
};

using TokenSeq = std::vector<Token>;
using TextSeq = std::vector<std::string>;

TextSeq texts(const TokenSeq& tokens);

bool isLiteral(TokenKind kind) noexcept;

}  // namespace codemask
