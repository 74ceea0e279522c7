#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codemask/token.hpp"

namespace codemask {

// Placeholder → original text, in first-occurrence order.
struct AbstractionMap {
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* lookup(std::string_view placeholder) const noexcept;
  friend bool operator==(const AbstractionMap&, const AbstractionMap&) = default;
};

class IdiomTable {
 public:
  IdiomTable() = default;
  explicit IdiomTable(std::set<std::string> idioms) : idioms_(std::move(idioms)) {}

  // {i, j, k, index, 0, 1, 2, -1, "", 0.0, null, true, false, size, length}
  static const IdiomTable& defaults();
  static IdiomTable load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

  bool contains(std::string_view text) const { return idioms_.find(std::string(text)) != idioms_.end(); }
  const std::set<std::string>& entries() const noexcept { return idioms_; }

 private:
  std::set<std::string> idioms_;
};

/// True for texts of the form CATEGORY_k (k >= 1) with a known category.
bool isPlaceholder(std::string_view text) noexcept;

struct AbstractionResult {
  TokenSeq tokens;
  AbstractionMap map;
};

/// Token-aligned abstraction: identifiers become VAR_k / METHOD_k / TYPE_k,
/// number/char/string literals become INT_k / FLOAT_k / CHAR_k / STRING_k.
/// Keywords, operators, separators, annotations, boolean/null literals,
/// idioms and existing placeholders pass through.
AbstractionResult abstractTokens(const TokenSeq& tokens, const IdiomTable& idioms = IdiomTable::defaults());

/// Replaces placeholders with their original text. Throws
/// UnresolvedPlaceholderError listing every placeholder absent from the map.
TextSeq deabstract(const TextSeq& tokens, const AbstractionMap& map);
TokenSeq deabstract(const TokenSeq& tokens, const AbstractionMap& map);

}  // namespace codemask
