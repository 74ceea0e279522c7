#include "codemask/abstractor.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <unordered_map>

#include "codemask/error.hpp"
#include "codemask/lexer.hpp"

namespace codemask {

namespace {

constexpr std::array<std::string_view, 7> kCategories{"VAR", "METHOD", "TYPE", "INT", "FLOAT", "CHAR", "STRING"};

enum Category : std::size_t { Var, Method, Type, Int, Float, Char, String };

bool upperInitial(std::string_view text) {
  return !text.empty() && std::isupper(static_cast<unsigned char>(text.front()));
}

bool floatLiteral(std::string_view text) {
  const bool hex = text.size() > 1 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X');
  if (hex) return text.find_first_of(".pP") != std::string_view::npos;
  if (text.find_first_of(".eE") != std::string_view::npos) return true;
  const char last = text.back();
  return last == 'f' || last == 'F' || last == 'd' || last == 'D';
}

// Marks tokens that sit inside the parentheses of a catch clause.
std::vector<bool> catchParameterMask(const TokenSeq& tokens) {
  std::vector<bool> mask(tokens.size(), false);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (!tokens[i].is("catch") || !tokens[i + 1].is("(")) continue;
    int depth = 0;
    for (std::size_t k = i + 1; k < tokens.size(); ++k) {
      if (tokens[k].is("(")) ++depth;
      if (tokens[k].is(")") && --depth == 0) break;
      mask[k] = true;
    }
  }
  return mask;
}

bool typePosition(const TokenSeq& tokens, std::size_t i, bool inCatch) {
  const auto at = [&](std::ptrdiff_t offset) -> const Token* {
    const auto k = static_cast<std::ptrdiff_t>(i) + offset;
    if (k < 0 || k >= static_cast<std::ptrdiff_t>(tokens.size())) return nullptr;
    return &tokens[static_cast<std::size_t>(k)];
  };
  const Token* prev = at(-1);
  const Token* next = at(1);
  const Token* next2 = at(2);
  if (inCatch) return true;
  if (prev && (prev->is("new") || prev->is("extends") || prev->is("implements") || prev->is("instanceof") ||
               prev->is("throws") || prev->is("<"))) {
    return true;
  }
  if (!next) return false;
  if (next->kind == TokenKind::Identifier) return true;
  if (next->is("<") || next->is(">") || next->is(">>") || next->is(">>>") || next->is("...")) return true;
  if (next->is("[") && next2 && next2->is("]")) return true;
  return prev && prev->is("(") && next->is(")");  // cast
}

Category identifierCategory(const TokenSeq& tokens, std::size_t i, bool inCatch) {
  if (upperInitial(tokens[i].text) && typePosition(tokens, i, inCatch)) return Type;
  if (i + 1 < tokens.size() && tokens[i + 1].is("(")) return Method;
  return Var;
}

}  // namespace

const std::string* AbstractionMap::lookup(std::string_view placeholder) const noexcept {
  for (const auto& [ph, original] : entries) {
    if (ph == placeholder) return &original;
  }
  return nullptr;
}

const IdiomTable& IdiomTable::defaults() {
  static const IdiomTable table(std::set<std::string>{"i", "j", "k", "index", "0", "1", "2", "-1", "\"\"", "0.0",
                                                      "null", "true", "false", "size", "length"});
  return table;
}

IdiomTable IdiomTable::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot read idiom table " + file.string());
  std::set<std::string> idioms;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) idioms.insert(line);
  }
  return IdiomTable(std::move(idioms));
}

void IdiomTable::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write idiom table " + file.string());
  for (const auto& idiom : idioms_) out << idiom << '\n';
}

bool isPlaceholder(std::string_view text) noexcept {
  const auto underscore = text.rfind('_');
  if (underscore == std::string_view::npos || underscore + 1 >= text.size()) return false;
  const auto category = text.substr(0, underscore);
  if (std::find(kCategories.begin(), kCategories.end(), category) == kCategories.end()) return false;
  const auto digits = text.substr(underscore + 1);
  if (digits.front() == '0') return false;
  return std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

AbstractionResult abstractTokens(const TokenSeq& tokens, const IdiomTable& idioms) {
  AbstractionResult result;
  result.tokens = tokens;
  const auto inCatch = catchParameterMask(tokens);
  std::array<std::unordered_map<std::string, std::string>, kCategories.size()> assigned;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (idioms.contains(t.text) || isPlaceholder(t.text)) continue;
    Category category;
    switch (t.kind) {
      case TokenKind::Identifier:
        category = identifierCategory(tokens, i, inCatch[i]);
        break;
      case TokenKind::NumberLiteral:
        category = floatLiteral(t.text) ? Float : Int;
        break;
      case TokenKind::CharLiteral:
        category = Char;
        break;
      case TokenKind::StringLiteral:
        category = String;
        break;
      default:
        continue;
    }
    auto& table = assigned[category];
    auto it = table.find(t.text);
    if (it == table.end()) {
      std::string placeholder = std::string(kCategories[category]) + "_" + std::to_string(table.size() + 1);
      it = table.emplace(t.text, placeholder).first;
      result.map.entries.emplace_back(std::move(placeholder), t.text);
    }
    result.tokens[i].text = it->second;
    result.tokens[i].kind = TokenKind::Placeholder;
  }
  return result;
}

TextSeq deabstract(const TextSeq& tokens, const AbstractionMap& map) {
  TextSeq out;
  out.reserve(tokens.size());
  std::vector<std::string> unresolved;
  for (const auto& t : tokens) {
    if (!isPlaceholder(t)) {
      out.push_back(t);
    } else if (const std::string* original = map.lookup(t)) {
      out.push_back(*original);
    } else {
      if (std::find(unresolved.begin(), unresolved.end(), t) == unresolved.end()) unresolved.push_back(t);
      out.push_back(t);
    }
  }
  if (!unresolved.empty()) {
    std::string message = "unresolved placeholder(s):";
    for (const auto& u : unresolved) message += " " + u;
    throw UnresolvedPlaceholderError(message);
  }
  return out;
}

TokenSeq deabstract(const TokenSeq& tokens, const AbstractionMap& map) {
  const TextSeq restored = deabstract(texts(tokens), map);
  TokenSeq out = tokens;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].kind != TokenKind::Placeholder) continue;
    out[i].text = restored[i];
    const TokenSeq relexed = lex(restored[i]);
    out[i].kind = relexed.size() == 1 ? relexed.front().kind : TokenKind::Identifier;
  }
  return out;
}

}  // namespace codemask
