#include "codemask/lexer.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "codemask/error.hpp"

namespace codemask {

namespace {

constexpr std::array<std::string_view, 41> kKeywords{
    "abstract",   "assert",    "break",      "case",      "catch",  "class",   "const",        "continue", "default",
    "do",         "else",      "enum",       "extends",   "final",  "finally", "for",          "goto",     "if",
    "implements", "import",    "instanceof", "interface", "native", "new",     "package",      "private",  "protected",
    "public",     "return",    "static",     "strictfp",  "super",  "switch",  "synchronized", "this",     "throw",
    "throws",     "transient", "try",        "volatile",  "while"};

constexpr std::array<std::string_view, 9> kTypeKeywords{"boolean", "byte",  "char",   "short", "int",
                                                        "long",    "float", "double", "void"};

// Longest first so the first prefix hit is the maximal munch.
constexpr std::array<std::string_view, 25> kMultiCharOperators{
    ">>>=", "<<=", ">>=", ">>>", "->", "++", "--", "&&", "||", "==", "!=",  "<=", ">=",
    "+=",   "-=",  "*=",  "/=",  "&=", "|=", "^=", "%=", "<<", ">>", "...", "::"};

bool isIdentStart(unsigned char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}

bool isIdentPart(unsigned char c) noexcept { return isIdentStart(c) || (c >= '0' && c <= '9'); }

bool isDigit(unsigned char c) noexcept { return c >= '0' && c <= '9'; }

bool isHexDigit(unsigned char c) noexcept { return isDigit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }

bool isSpace(unsigned char c) noexcept { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

class Scanner {
 public:
  explicit Scanner(std::string_view src) : src_(src) {}

  TokenSeq run() {
    TokenSeq out;
    while (true) {
      skipTrivia();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const noexcept { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  void skipTrivia() {
    while (pos_ < src_.size()) {
      const char c = peek();
      if (isSpace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        const int startLine = line_;
        advance(2);
        while (true) {
          if (pos_ >= src_.size()) throw LexError(startLine, "unterminated block comment");
          if (peek() == '*' && peek(1) == '/') {
            advance(2);
            break;
          }
          advance();
        }
      } else {
        break;
      }
    }
  }

  Token make(std::size_t start, int line, TokenKind kind) const {
    return Token{std::string(src_.substr(start, pos_ - start)), kind, line, start};
  }

  Token next() {
    const std::size_t start = pos_;
    const int line = line_;
    const auto c = static_cast<unsigned char>(peek());

    if (isIdentStart(c)) {
      while (pos_ < src_.size() && isIdentPart(static_cast<unsigned char>(peek()))) advance();
      const std::string_view word = src_.substr(start, pos_ - start);
      TokenKind kind = TokenKind::Identifier;
      if (word == "true" || word == "false") {
        kind = TokenKind::BooleanLiteral;
      } else if (word == "null") {
        kind = TokenKind::NullLiteral;
      } else if (isJavaTypeKeyword(word)) {
        kind = TokenKind::TypeKeyword;
      } else if (isJavaKeyword(word)) {
        kind = TokenKind::Keyword;
      }
      return make(start, line, kind);
    }
    if (isDigit(c) || (c == '.' && isDigit(static_cast<unsigned char>(peek(1))))) {
      scanNumber();
      return make(start, line, TokenKind::NumberLiteral);
    }
    if (c == '"') {
      scanString();
      return make(start, line, TokenKind::StringLiteral);
    }
    if (c == '\'') {
      scanQuoted('\'', "unterminated char literal");
      return make(start, line, TokenKind::CharLiteral);
    }
    if (c == '@' && isIdentStart(static_cast<unsigned char>(peek(1)))) {
      advance();
      scanQualifiedName();
      return make(start, line, TokenKind::Annotation);
    }
    for (std::string_view op : kMultiCharOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        advance(op.size());
        const bool separator = op == "..." || op == "::";
        return make(start, line, separator ? TokenKind::Separator : TokenKind::Operator);
      }
    }
    switch (c) {
      case '(':
      case ')':
      case '{':
      case '}':
      case '[':
      case ']':
      case ';':
      case ',':
      case '.':
      case '@':
        advance();
        return make(start, line, TokenKind::Separator);
      case '=':
      case '>':
      case '<':
      case '!':
      case '~':
      case '?':
      case ':':
      case '+':
      case '-':
      case '*':
      case '/':
      case '&':
      case '|':
      case '^':
      case '%':
        advance();
        return make(start, line, TokenKind::Operator);
      default:
        break;
    }
    throw LexError(line, "unexpected character '" + std::string(1, static_cast<char>(c)) + "'");
  }

  void scanQualifiedName() {
    while (true) {
      while (pos_ < src_.size() && isIdentPart(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '.' && isIdentStart(static_cast<unsigned char>(peek(1)))) {
        advance();
        continue;
      }
      break;
    }
  }

  void scanDigits(bool hex) {
    while (pos_ < src_.size()) {
      const auto d = static_cast<unsigned char>(peek());
      if (d == '_' || (hex ? isHexDigit(d) : isDigit(d))) {
        advance();
      } else {
        break;
      }
    }
  }

  void scanExponent(char lower, char upper) {
    if (peek() == lower || peek() == upper) {
      const char sign = peek(1);
      const std::size_t digitAt = (sign == '+' || sign == '-') ? 2 : 1;
      if (isDigit(static_cast<unsigned char>(peek(digitAt)))) {
        advance(digitAt);
        scanDigits(false);
      }
    }
  }

  void scanNumber() {
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance(2);
      scanDigits(true);
      if (peek() == '.') {
        advance();
        scanDigits(true);
      }
      scanExponent('p', 'P');
    } else if (peek() == '0' && (peek(1) == 'b' || peek(1) == 'B')) {
      advance(2);
      scanDigits(false);
    } else {
      scanDigits(false);
      if (peek() == '.' && isDigit(static_cast<unsigned char>(peek(1)))) {
        advance();
        scanDigits(false);
      } else if (peek() == '.' && !isIdentStart(static_cast<unsigned char>(peek(1))) && peek(1) != '.') {
        advance();  // "1." is a complete double literal
      }
      scanExponent('e', 'E');
    }
    switch (peek()) {
      case 'l':
      case 'L':
      case 'f':
      case 'F':
      case 'd':
      case 'D':
        advance();
        break;
      default:
        break;
    }
  }

  void scanQuoted(char quote, const char* message) {
    const int startLine = line_;
    advance();
    while (true) {
      if (pos_ >= src_.size() || peek() == '\n') throw LexError(startLine, message);
      const char ch = peek();
      if (ch == '\\') {
        advance(2);
        continue;
      }
      advance();
      if (ch == quote) return;
    }
  }

  void scanString() {
    if (peek(1) == '"' && peek(2) == '"') {
      const int startLine = line_;
      advance(3);
      while (true) {
        if (pos_ >= src_.size()) throw LexError(startLine, "unterminated text block");
        if (peek() == '\\') {
          advance(2);
          continue;
        }
        if (peek() == '"' && peek(1) == '"' && peek(2) == '"') {
          advance(3);
          return;
        }
        advance();
      }
    }
    scanQuoted('"', "unterminated string literal");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

bool isJavaKeyword(std::string_view text) noexcept {
  return std::find(kKeywords.begin(), kKeywords.end(), text) != kKeywords.end();
}

bool isJavaTypeKeyword(std::string_view text) noexcept {
  return std::find(kTypeKeywords.begin(), kTypeKeywords.end(), text) != kTypeKeywords.end();
}

TokenSeq lex(std::string_view source) { return Scanner(source).run(); }

std::string detokenize(const TextSeq& texts) {
  std::string out;
  for (const auto& t : texts) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string detokenize(const TokenSeq& tokens) { return detokenize(texts(tokens)); }

}  // namespace codemask
