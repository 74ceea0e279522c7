#pragma once

#include <string>
#include <string_view>

#include "codemask/token.hpp"

namespace codemask {

/// Tokenizes Java source text.
///
/// Comments are dropped, string/char literals (including text blocks) are
/// single tokens, operators use maximal munch, and "@Name" lexes as one
/// annotation token. Unicode escapes are left as written. Throws LexError on
/// an unterminated literal or block comment, or on a character that cannot
/// start any Java token.
TokenSeq lex(std::string_view source);

/// Joins token texts with single spaces. lex(detokenize(t)) reproduces the
/// (text, kind) sequence of t.
std::string detokenize(const TokenSeq& tokens);
std::string detokenize(const TextSeq& texts);

bool isJavaKeyword(std::string_view text) noexcept;
bool isJavaTypeKeyword(std::string_view text) noexcept;

}  // namespace codemask
