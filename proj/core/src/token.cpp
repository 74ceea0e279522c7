#include "codemask/token.hpp"

#include <array>
#include <utility>

namespace codemask {

namespace {

constexpr std::array<std::pair<TokenKind, std::string_view>, 12> kKindNames{{
    {TokenKind::Identifier, "identifier"},
    {TokenKind::Keyword, "keyword"},
    {TokenKind::TypeKeyword, "type-keyword"},
    {TokenKind::NumberLiteral, "number-literal"},
    {TokenKind::StringLiteral, "string-literal"},
    {TokenKind::CharLiteral, "char-literal"},
    {TokenKind::BooleanLiteral, "boolean-literal"},
    {TokenKind::NullLiteral, "null-literal"},
    {TokenKind::Operator, "operator"},
    {TokenKind::Separator, "separator"},
    {TokenKind::Annotation, "annotation"},
    {TokenKind::Placeholder, "placeholder"},
}};

}  // namespace

std::string_view toString(TokenKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<TokenKind> tokenKindFromString(std::string_view name) noexcept {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

TextSeq texts(const TokenSeq& tokens) {
  TextSeq out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

bool isLiteral(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::NumberLiteral:
    case TokenKind::StringLiteral:
    case TokenKind::CharLiteral:
    case TokenKind::BooleanLiteral:
    case TokenKind::NullLiteral:
      return true;
    default:
      return false;
  }
}

}  // namespace codemask
