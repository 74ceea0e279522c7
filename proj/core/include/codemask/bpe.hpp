#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace codemask {

/// Byte-level BPE model. Ids 0..255 are the raw bytes, the next ids are the
/// special tokens (atomic, never split), then one id per merge in training
/// order. There is no unknown token: every byte string encodes.
class BpeModel {
 public:
  using Merge = std::pair<std::string, std::string>;

  BpeModel() : BpeModel({}, {}) {}
  BpeModel(std::vector<std::string> specials, std::vector<Merge> merges);

  const std::vector<Merge>& merges() const noexcept { return merges_; }
  const std::vector<std::string>& specials() const noexcept { return specials_; }
  std::size_t vocabSize() const noexcept { return symbols_.size(); }
  const std::string& symbol(int id) const;  // raw bytes of the symbol
  bool isSpecial(int id) const noexcept;
  std::optional<int> specialId(std::string_view text) const noexcept;

  std::vector<int> encode(std::string_view text) const;
  /// Throws Error on an id outside the vocabulary.
  std::string decode(const std::vector<int>& ids) const;

  /// Writes merges.txt, vocab.jsonl and bpe.json into `dir`.
  void save(const std::filesystem::path& dir) const;
  static BpeModel load(const std::filesystem::path& dir);

 private:
  void encodeChunk(std::string_view chunk, std::vector<int>& out) const;

  std::vector<std::string> specials_;
  std::vector<Merge> merges_;
  std::vector<std::string> symbols_;
  std::unordered_map<std::uint64_t, int> mergeRank_;  // (left id, right id) -> rank
  std::unordered_map<std::uint64_t, int> mergeResult_;
};

inline const std::vector<std::string>& defaultSpecialTokens() {
  static const std::vector<std::string> specials{"<MASK>", "<pad>", "<s>", "</s>"};
  return specials;
}

/// Splits text into pre-tokenization chunks: special tokens, maximal
/// whitespace runs, and maximal non-whitespace runs. Merges never cross a
/// chunk boundary. Second member is the special index or -1.
std::vector<std::pair<std::string_view, int>> pretokenize(std::string_view text,
                                                          const std::vector<std::string>& specials);

/// Learns merges until the vocabulary holds `vocabSize` symbols or no
/// adjacent pair occurs at least twice. Ties go to the lexicographically
/// smallest (left, right) byte-string pair. Throws Error when vocabSize is
/// smaller than 256 + specials.
BpeModel trainBpe(const std::vector<std::string>& corpus, std::size_t vocabSize,
                  const std::vector<std::string>& specials = defaultSpecialTokens());

/// GPT-2 style printable rendering of raw bytes, used in model files.
std::string bytesToPrintable(std::string_view bytes);
std::string printableToBytes(std::string_view printable);

}  // namespace codemask
