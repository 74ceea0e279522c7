#include "codemask/structure.hpp"

#include <algorithm>
#include <array>

#include "codemask/error.hpp"
#include "codemask/lexer.hpp"

namespace codemask {

namespace {

constexpr std::array<std::pair<ConstructKind, std::string_view>, 5> kConstructNames{{
    {ConstructKind::IfCondition, "if-condition"},
    {ConstructKind::WhileCondition, "while-condition"},
    {ConstructKind::ForControl, "for-control"},
    {ConstructKind::CallArguments, "call-arguments"},
    {ConstructKind::CatchParameter, "catch-parameter"},
}};

bool isOneOf(const Token& t, std::initializer_list<std::string_view> options) {
  return std::any_of(options.begin(), options.end(), [&](std::string_view o) { return t.text == o; });
}

bool isModifier(const Token& t) {
  return t.kind == TokenKind::Keyword && isOneOf(t, {"public", "private", "protected", "static", "final", "abstract",
                                                     "synchronized", "native", "strictfp", "default"});
}

// Whether the identifier at `name` can be the name in a method declaration,
// judged by the token right before it.
bool declarationContext(const TokenSeq& tokens, std::size_t name) {
  if (name == 0) return true;
  const Token& prev = tokens[name - 1];
  switch (prev.kind) {
    case TokenKind::Identifier:
    case TokenKind::TypeKeyword:
    case TokenKind::Annotation:
      return true;
    case TokenKind::Keyword:
      return isModifier(prev);
    default:
      return isOneOf(prev, {">", ">>", ">>>", "]", ";", "{", "}"});
  }
}

// `name ( ... ) [throws ...] {` with `name` in declaration context. Returns
// the index of the body's "{".
std::optional<std::size_t> declarationBody(const TokenSeq& tokens, std::size_t name) {
  if (tokens[name].kind != TokenKind::Identifier || name + 1 >= tokens.size() || !tokens[name + 1].is("(") ||
      !declarationContext(tokens, name)) {
    return std::nullopt;
  }
  const auto close = matchDelimiter(tokens, name + 1);
  if (!close) return std::nullopt;
  std::size_t j = *close + 1;
  if (j < tokens.size() && tokens[j].is("throws")) {
    while (j < tokens.size() && !isOneOf(tokens[j], {"{", ";", "}", "("})) ++j;
  }
  if (j < tokens.size() && tokens[j].is("{")) return j;
  return std::nullopt;
}

// Token texts that may appear inside a (possibly generic, qualified) type name.
bool typeNamePart(const Token& t) {
  return t.kind == TokenKind::Identifier || t.kind == TokenKind::TypeKeyword || t.kind == TokenKind::Annotation ||
         isOneOf(t, {".", "<", ">", ">>", ">>>", ",", "?", "extends", "super", "[", "]"});
}

// True when the "(" at `open` is the argument list of `new Type<...>(`.
bool constructorCall(const TokenSeq& tokens, std::size_t open) {
  std::size_t k = open;
  while (k > 0) {
    --k;
    if (tokens[k].is("new")) return true;
    if (!typeNamePart(tokens[k])) return false;
  }
  return false;
}

// Call sites: identifier, ")", "]", this/super, or the ">" closing explicit
// generic arguments of a constructor, immediately followed by "(".
bool callSite(const TokenSeq& tokens, std::size_t open) {
  if (open == 0) return false;
  const Token& prev = tokens[open - 1];
  if (prev.kind == TokenKind::Identifier) {
    return !declarationBody(tokens, open - 1).has_value() || constructorCall(tokens, open);
  }
  if (prev.kind == TokenKind::Keyword) return prev.is("this") || prev.is("super");
  if (prev.is(")") || prev.is("]")) return true;
  if (isOneOf(prev, {">", ">>", ">>>"})) return constructorCall(tokens, open);
  return false;
}

bool compoundLead(const Token& t) {
  return t.kind == TokenKind::Keyword && isOneOf(t, {"if", "else", "for", "while", "do", "try", "switch",
                                                     "synchronized", "class", "interface", "enum", "static"});
}

bool declaresLocalType(const TokenSeq& tokens, std::size_t lead, std::size_t brace) {
  for (std::size_t k = lead; k < brace; ++k) {
    if (tokens[k].is("new")) return false;
    if (isOneOf(tokens[k], {"class", "interface", "enum"})) return true;
  }
  return false;
}

// A "{" that opens an expression (anonymous class body, lambda body, array
// initializer) rather than a statement.
bool expressionBrace(const TokenSeq& tokens, std::size_t brace) {
  if (brace == 0) return false;
  const Token& prev = tokens[brace - 1];
  if (isOneOf(prev, {"=", "->", "(", ",", "return", "?", "]", "yield"})) return true;
  if (prev.is(")")) {
    // Walk back to the "(" and test for `new Type(...)`.
    int depth = 0;
    for (std::size_t k = brace - 1;; --k) {
      if (tokens[k].is(")")) ++depth;
      if (tokens[k].is("(") && --depth == 0) return constructorCall(tokens, k);
      if (k == 0) break;
    }
  }
  return false;
}

}  // namespace

std::string_view toString(ConstructKind kind) noexcept {
  for (const auto& [k, name] : kConstructNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ConstructKind> constructKindFromString(std::string_view name) noexcept {
  for (const auto& [k, n] : kConstructNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::optional<std::size_t> matchDelimiter(const TokenSeq& tokens, std::size_t open) {
  if (open >= tokens.size()) return std::nullopt;
  const std::string& opener = tokens[open].text;
  std::string_view closer;
  if (opener == "(") {
    closer = ")";
  } else if (opener == "{") {
    closer = "}";
  } else if (opener == "[") {
    closer = "]";
  } else {
    return std::nullopt;
  }
  int depth = 0;
  for (std::size_t i = open; i < tokens.size(); ++i) {
    if (tokens[i].text == opener) {
      ++depth;
    } else if (tokens[i].text == closer && --depth == 0) {
      return i;
    }
  }
  return std::nullopt;
}

ExtractionResult extractMethods(const std::vector<std::string>& sources) {
  ExtractionResult result;
  for (std::size_t f = 0; f < sources.size(); ++f) {
    const std::string& source = sources[f];
    TokenSeq tokens;
    try {
      tokens = lex(source);
    } catch (const LexError& e) {
      result.diagnostics.push_back("file " + std::to_string(f) + ": " + e.what());
      continue;
    }
    int balance = 0;
    bool balanced = true;
    for (const auto& t : tokens) {
      if (t.is("{")) ++balance;
      if (t.is("}") && --balance < 0) balanced = false;
    }
    if (!balanced || balance != 0) {
      result.diagnostics.push_back("file " + std::to_string(f) + ": unbalanced braces");
      continue;
    }

    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto body = declarationBody(tokens, i);
      if (!body) continue;
      const auto bodyEnd = matchDelimiter(tokens, *body);
      if (!bodyEnd) continue;
      std::size_t start = i;
      while (start > 0 && !isOneOf(tokens[start - 1], {";", "{", "}"})) --start;

      ExtractedMethod m;
      m.name = tokens[i].text;
      const std::size_t from = tokens[start].offset;
      const std::size_t to = tokens[*bodyEnd].offset + 1;
      m.source = source.substr(from, to - from);
      m.tokens = lex(m.source);
      m.firstLine = tokens[start].line;
      result.methods.push_back(std::move(m));
      i = *bodyEnd;
    }
  }
  return result;
}

std::optional<std::string> methodName(const TokenSeq& tokens) {
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (tokens[i].is("{")) break;
    if (tokens[i].is("(") && tokens[i - 1].kind == TokenKind::Identifier) {
      return tokens[i - 1].text;
    }
  }
  return std::nullopt;
}

std::vector<ConstructSpan> findConstructs(const TokenSeq& tokens) {
  std::vector<ConstructSpan> spans;
  auto emit = [&](ConstructKind kind, std::size_t open) {
    const auto close = matchDelimiter(tokens, open);
    if (close && *close > open + 1) spans.push_back({kind, open + 1, *close});
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.kind == TokenKind::Keyword && i + 1 < tokens.size() && tokens[i + 1].is("(")) {
      if (t.is("if")) {
        emit(ConstructKind::IfCondition, i + 1);
      } else if (t.is("while")) {
        emit(ConstructKind::WhileCondition, i + 1);
      } else if (t.is("for")) {
        emit(ConstructKind::ForControl, i + 1);
      } else if (t.is("catch")) {
        emit(ConstructKind::CatchParameter, i + 1);
      }
    }
    if (t.is("(") && callSite(tokens, i)) emit(ConstructKind::CallArguments, i);
  }
  return spans;
}

int countStatements(const TokenSeq& tokens, std::size_t open, std::size_t close) {
  int count = 0;
  bool pending = false;
  std::size_t lead = 0;

  auto finish = [&] {
    ++count;
    pending = false;
  };
  auto continues = [&](std::size_t next) {
    if (next >= close) return false;
    const Token& t = tokens[next];
    if (isOneOf(t, {"else", "catch", "finally"})) return true;
    return tokens[lead].is("do") && t.is("while");
  };

  std::size_t i = open + 1;
  while (i < close) {
    const Token& t = tokens[i];
    if (t.is("(") || t.is("[")) {
      if (!pending) {
        pending = true;
        lead = i;
      }
      const auto j = matchDelimiter(tokens, i);
      i = (j && *j < close) ? *j + 1 : i + 1;
      continue;
    }
    if (t.is("{")) {
      const auto j = matchDelimiter(tokens, i);
      if (!j || *j >= close) throw StructureError("unbalanced braces");
      const bool compound = !pending || (!expressionBrace(tokens, i) &&
                                         (compoundLead(tokens[lead]) || declaresLocalType(tokens, lead, i)));
      if (!pending) lead = i;
      pending = true;
      if (compound && !continues(*j + 1)) finish();
      i = *j + 1;
      continue;
    }
    if (t.is(";")) {
      if (pending && !continues(i + 1)) finish();
      ++i;
      continue;
    }
    if (t.is(":") && pending) {
      // Labels and switch-case labels are not statements of their own.
      const bool label = lead + 1 == i && tokens[lead].kind == TokenKind::Identifier;
      const bool caseLabel = tokens[lead].is("case") || tokens[lead].is("default");
      if (label || caseLabel) {
        pending = false;
        ++i;
        continue;
      }
    }
    if (!pending) {
      pending = true;
      lead = i;
    }
    ++i;
  }
  if (pending) ++count;
  return count;
}

std::vector<BlockSpan> findBlocks(const TokenSeq& tokens) {
  std::vector<BlockSpan> blocks;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].is("{")) {
      stack.push_back(i);
    } else if (tokens[i].is("}")) {
      if (stack.empty()) throw StructureError("unmatched '}' at token " + std::to_string(i));
      blocks.push_back({stack.back(), i, 0});
      stack.pop_back();
    }
  }
  if (!stack.empty()) throw StructureError("unclosed '{' at token " + std::to_string(stack.back()));
  std::sort(blocks.begin(), blocks.end(), [](const BlockSpan& a, const BlockSpan& b) { return a.start < b.start; });
  for (auto& b : blocks) b.statementCount = countStatements(tokens, b.start, b.end);
  return blocks;
}

std::vector<LineGroup> segmentLines(const TokenSeq& tokens) {
  std::vector<LineGroup> groups;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (groups.empty() || groups.back().line != tokens[i].line) {
      groups.push_back({tokens[i].line, i, i + 1});
    } else {
      groups.back().end = i + 1;
    }
  }
  return groups;
}

}  // namespace codemask
