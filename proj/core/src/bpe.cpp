#include "codemask/bpe.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>
#include <unordered_set>

#include "codemask/error.hpp"
#include "codemask/jsonl.hpp"

namespace codemask {

namespace {

constexpr std::uint64_t pairKey(int left, int right) noexcept {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(left)) << 32) | static_cast<std::uint32_t>(right);
}

bool isBpeSpace(char c) noexcept { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Byte -> code point table of the GPT-2 byte-level encoding.
const std::array<char32_t, 256>& byteCodePoints() {
  static const std::array<char32_t, 256> table = [] {
    std::array<char32_t, 256> t{};
    char32_t extra = 256;
    for (int b = 0; b < 256; ++b) {
      const bool printable = (b >= 33 && b <= 126) || (b >= 161 && b <= 172) || (b >= 174 && b <= 255);
      t[static_cast<std::size_t>(b)] = printable ? static_cast<char32_t>(b) : extra++;
    }
    return t;
  }();
  return table;
}

void appendUtf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

struct Word {
  std::vector<int> symbols;
  long long freq = 0;
};

}  // namespace

std::string bytesToPrintable(std::string_view bytes) {
  const auto& table = byteCodePoints();
  std::string out;
  for (char c : bytes) appendUtf8(out, table[static_cast<unsigned char>(c)]);
  return out;
}

std::string printableToBytes(std::string_view printable) {
  static const std::unordered_map<char32_t, unsigned char> reverse = [] {
    std::unordered_map<char32_t, unsigned char> r;
    const auto& table = byteCodePoints();
    for (int b = 0; b < 256; ++b) r[table[static_cast<std::size_t>(b)]] = static_cast<unsigned char>(b);
    return r;
  }();
  std::string out;
  for (std::size_t i = 0; i < printable.size();) {
    const auto lead = static_cast<unsigned char>(printable[i]);
    char32_t cp = 0;
    std::size_t len = 1;
    if (lead < 0x80) {
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0 && i + 1 < printable.size()) {
      cp = ((lead & 0x1Fu) << 6) | (static_cast<unsigned char>(printable[i + 1]) & 0x3Fu);
      len = 2;
    } else if ((lead & 0xF0) == 0xE0 && i + 2 < printable.size()) {
      cp = ((lead & 0x0Fu) << 12) | ((static_cast<unsigned char>(printable[i + 1]) & 0x3Fu) << 6) |
           (static_cast<unsigned char>(printable[i + 2]) & 0x3Fu);
      len = 3;
    } else {
      throw FormatError("invalid byte-level symbol encoding");
    }
    const auto it = reverse.find(cp);
    if (it == reverse.end()) throw FormatError("code point outside the byte-level alphabet");
    out.push_back(static_cast<char>(it->second));
    i += len;
  }
  return out;
}

std::vector<std::pair<std::string_view, int>> pretokenize(std::string_view text,
                                                          const std::vector<std::string>& specials) {
  std::vector<std::pair<std::string_view, int>> chunks;
  std::size_t pos = 0;
  std::size_t runStart = 0;
  auto flushRuns = [&](std::size_t end) {
    std::size_t i = runStart;
    while (i < end) {
      const bool space = isBpeSpace(text[i]);
      std::size_t j = i + 1;
      while (j < end && isBpeSpace(text[j]) == space) ++j;
      chunks.emplace_back(text.substr(i, j - i), -1);
      i = j;
    }
  };
  while (pos < text.size()) {
    int matched = -1;
    std::size_t matchedLen = 0;
    for (std::size_t s = 0; s < specials.size(); ++s) {
      const auto& sp = specials[s];
      if (sp.size() > matchedLen && text.compare(pos, sp.size(), sp) == 0) {
        matched = static_cast<int>(s);
        matchedLen = sp.size();
      }
    }
    if (matched >= 0) {
      flushRuns(pos);
      chunks.emplace_back(text.substr(pos, matchedLen), matched);
      pos += matchedLen;
      runStart = pos;
    } else {
      ++pos;
    }
  }
  flushRuns(text.size());
  return chunks;
}

BpeModel::BpeModel(std::vector<std::string> specials, std::vector<Merge> merges)
    : specials_(std::move(specials)), merges_(std::move(merges)) {
  symbols_.reserve(256 + specials_.size() + merges_.size());
  for (int b = 0; b < 256; ++b) symbols_.emplace_back(1, static_cast<char>(b));
  for (const auto& s : specials_) {
    if (s.empty()) throw Error("empty special token");
    symbols_.push_back(s);
  }
  std::unordered_map<std::string, int> byBytes;
  for (int b = 0; b < 256; ++b) byBytes.emplace(symbols_[static_cast<std::size_t>(b)], b);
  for (std::size_t r = 0; r < merges_.size(); ++r) {
    const auto& [left, right] = merges_[r];
    const auto l = byBytes.find(left);
    const auto rt = byBytes.find(right);
    if (l == byBytes.end() || rt == byBytes.end()) {
      throw FormatError("merge " + std::to_string(r + 1) + " uses a symbol not yet defined");
    }
    const int id = static_cast<int>(symbols_.size());
    if (!byBytes.emplace(left + right, id).second) {
      throw FormatError("merge " + std::to_string(r + 1) + " repeats an existing symbol");
    }
    symbols_.push_back(left + right);
    const auto key = pairKey(l->second, rt->second);
    mergeRank_.emplace(key, static_cast<int>(r));
    mergeResult_.emplace(key, id);
  }
}

const std::string& BpeModel::symbol(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= symbols_.size()) {
    throw Error("token id " + std::to_string(id) + " outside vocabulary");
  }
  return symbols_[static_cast<std::size_t>(id)];
}

bool BpeModel::isSpecial(int id) const noexcept {
  return id >= 256 && static_cast<std::size_t>(id) < 256 + specials_.size();
}

std::optional<int> BpeModel::specialId(std::string_view text) const noexcept {
  for (std::size_t s = 0; s < specials_.size(); ++s) {
    if (specials_[s] == text) return static_cast<int>(256 + s);
  }
  return std::nullopt;
}

void BpeModel::encodeChunk(std::string_view chunk, std::vector<int>& out) const {
  std::vector<int> syms;
  syms.reserve(chunk.size());
  for (char c : chunk) syms.push_back(static_cast<unsigned char>(c));
  while (syms.size() > 1) {
    int bestRank = -1;
    std::uint64_t bestKey = 0;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      const auto key = pairKey(syms[i], syms[i + 1]);
      const auto it = mergeRank_.find(key);
      if (it != mergeRank_.end() && (bestRank < 0 || it->second < bestRank)) {
        bestRank = it->second;
        bestKey = key;
      }
    }
    if (bestRank < 0) break;
    const int merged = mergeResult_.at(bestKey);
    std::vector<int> next;
    next.reserve(syms.size());
    for (std::size_t i = 0; i < syms.size(); ++i) {
      if (i + 1 < syms.size() && pairKey(syms[i], syms[i + 1]) == bestKey) {
        next.push_back(merged);
        ++i;
      } else {
        next.push_back(syms[i]);
      }
    }
    syms = std::move(next);
  }
  out.insert(out.end(), syms.begin(), syms.end());
}

std::vector<int> BpeModel::encode(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& [chunk, special] : pretokenize(text, specials_)) {
    if (special >= 0) {
      ids.push_back(256 + special);
    } else {
      encodeChunk(chunk, ids);
    }
  }
  return ids;
}

std::string BpeModel::decode(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) out += symbol(id);
  return out;
}

void BpeModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ostringstream merges;
  merges << "#version: " << kFormatVersion << '\n';
  for (const auto& [left, right] : merges_) {
    merges << bytesToPrintable(left) << ' ' << bytesToPrintable(right) << '\n';
  }
  writeTextFile(dir / "merges.txt", merges.str());

  JsonlWriter vocab(dir / "vocab.jsonl");
  for (std::size_t id = 0; id < symbols_.size(); ++id) {
    const bool special = isSpecial(static_cast<int>(id));
    Json rec;
    rec["v"] = kFormatVersion;
    rec["sym"] = special ? symbols_[id] : bytesToPrintable(symbols_[id]);
    rec["id"] = id;
    if (special) rec["special"] = true;
    vocab.write(rec);
  }

  Json config;
  config["v"] = kFormatVersion;
  config["specials"] = specials_;
  config["pretokenization"] = "whitespace-runs";
  config["merges"] = merges_.size();
  config["vocab_size"] = symbols_.size();
  writeJsonFile(dir / "bpe.json", config);
}

BpeModel BpeModel::load(const std::filesystem::path& dir) {
  const Json config = readJsonFile(dir / "bpe.json");
  checkFormatVersion(config, (dir / "bpe.json").string());
  auto specials = config.at("specials").get<std::vector<std::string>>();

  std::istringstream in(readTextFile(dir / "merges.txt"));
  std::string line;
  std::vector<Merge> merges;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      if (line != "#version: " + std::to_string(kFormatVersion)) {
        throw FormatVersionError("merges.txt: unsupported version header '" + line + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos || line.find(' ', space + 1) != std::string::npos) {
      throw FormatError("merges.txt: malformed line '" + line + "'");
    }
    merges.emplace_back(printableToBytes(line.substr(0, space)), printableToBytes(line.substr(space + 1)));
  }
  return BpeModel(std::move(specials), std::move(merges));
}

BpeModel trainBpe(const std::vector<std::string>& corpus, std::size_t vocabSize,
                  const std::vector<std::string>& specials) {
  const std::size_t base = 256 + specials.size();
  if (vocabSize < base) {
    throw Error("vocab size " + std::to_string(vocabSize) + " below the " + std::to_string(base) +
                " byte and special symbols");
  }
  const std::size_t targetMerges = vocabSize - base;

  std::unordered_map<std::string_view, long long> chunkFreq;
  for (const auto& text : corpus) {
    for (const auto& [chunk, special] : pretokenize(text, specials)) {
      if (special < 0) ++chunkFreq[chunk];
    }
  }
  // Sorted for a deterministic word order.
  std::vector<std::pair<std::string_view, long long>> sortedChunks(chunkFreq.begin(), chunkFreq.end());
  std::sort(sortedChunks.begin(), sortedChunks.end());

  std::vector<Word> words;
  words.reserve(sortedChunks.size());
  for (const auto& [chunk, freq] : sortedChunks) {
    Word w;
    w.freq = freq;
    for (char c : chunk) w.symbols.push_back(static_cast<unsigned char>(c));
    words.push_back(std::move(w));
  }

  std::vector<std::string> symbolBytes;
  for (int b = 0; b < 256; ++b) symbolBytes.emplace_back(1, static_cast<char>(b));
  for (const auto& s : specials) symbolBytes.push_back(s);

  // Merges whose result would duplicate an existing symbol are never taken,
  // so every symbol has a unique byte string.
  std::unordered_set<std::string> known(symbolBytes.begin(), symbolBytes.end());
  std::unordered_set<std::uint64_t> blocked;

  std::unordered_map<std::uint64_t, long long> pairCount;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> pairWords;

  // Best pair first: highest count, then smallest (left, right) bytes.
  auto better = [&](const std::pair<long long, std::uint64_t>& a, const std::pair<long long, std::uint64_t>& b) {
    if (a.first != b.first) return a.first > b.first;
    const auto& al = symbolBytes[a.second >> 32];
    const auto& bl = symbolBytes[b.second >> 32];
    if (al != bl) return al < bl;
    return symbolBytes[a.second & 0xFFFFFFFFu] < symbolBytes[b.second & 0xFFFFFFFFu];
  };
  std::set<std::pair<long long, std::uint64_t>, decltype(better)> queue(better);

  auto adjust = [&](std::uint64_t key, long long delta) {
    auto& count = pairCount[key];
    if (count > 0) queue.erase({count, key});
    count += delta;
    if (count > 0 && !blocked.contains(key)) queue.insert({count, key});
  };
  auto addWordPairs = [&](std::size_t w, long long sign) {
    const auto& syms = words[w].symbols;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      const auto key = pairKey(syms[i], syms[i + 1]);
      adjust(key, sign * words[w].freq);
      if (sign > 0) pairWords[key].push_back(w);
    }
  };
  for (std::size_t w = 0; w < words.size(); ++w) addWordPairs(w, +1);

  std::vector<BpeModel::Merge> merges;
  while (merges.size() < targetMerges && !queue.empty()) {
    const auto [count, key] = *queue.begin();
    if (count < 2) break;
    const int left = static_cast<int>(key >> 32);
    const int right = static_cast<int>(key & 0xFFFFFFFFu);
    std::string joined = symbolBytes[static_cast<std::size_t>(left)] + symbolBytes[static_cast<std::size_t>(right)];
    if (known.contains(joined)) {
      queue.erase(queue.begin());
      blocked.insert(key);
      continue;
    }
    known.insert(joined);
    const int merged = static_cast<int>(symbolBytes.size());
    symbolBytes.push_back(std::move(joined));
    merges.emplace_back(symbolBytes[static_cast<std::size_t>(left)], symbolBytes[static_cast<std::size_t>(right)]);

    std::vector<std::size_t> affected = std::move(pairWords[key]);
    pairWords.erase(key);
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
    for (std::size_t w : affected) {
      auto& syms = words[w].symbols;
      bool present = false;
      for (std::size_t i = 0; i + 1 < syms.size() && !present; ++i) {
        present = syms[i] == left && syms[i + 1] == right;
      }
      if (!present) continue;
      addWordPairs(w, -1);
      std::vector<int> next;
      next.reserve(syms.size());
      for (std::size_t i = 0; i < syms.size(); ++i) {
        if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(syms[i]);
        }
      }
      syms = std::move(next);
      addWordPairs(w, +1);
    }
  }
  return BpeModel(specials, std::move(merges));
}

}  // namespace codemask
