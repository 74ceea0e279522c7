#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "codemask/token.hpp"

namespace codemask {

struct NgramConfig {
  int order = 6;
  double lambda = 0.5;  // Jelinek-Mercer weight of each order's MLE, in (0, 1]
  double cacheK = 10.0;

  void validate() const;
  friend bool operator==(const NgramConfig&, const NgramConfig&) = default;
};

/// k-gram counts for k = 1..order, stored per context. Used both for the
/// global model and for local caches.
class NgramCounts {
 public:
  struct ContextEntry {
    std::uint64_t total = 0;  // occurrences of the context followed by any token
    std::unordered_map<std::string, std::uint64_t> next;
  };

  explicit NgramCounts(int order = 6);

  int order() const noexcept { return order_; }
  bool empty() const noexcept { return vocab_.empty(); }
  const std::set<std::string>& vocab() const noexcept { return vocab_; }

  /// Counts every k-gram inside `tokens`; no context crosses sequences.
  void addSequence(const TextSeq& tokens);
  void addCount(const TextSeq& gram, std::uint64_t count);
  void merge(const NgramCounts& other);
  /// Removes counts previously merged or added. Throws Error when `other`
  /// holds a count this table does not.
  void subtract(const NgramCounts& other);

  /// Count of the k-gram `gram` (k = gram.size() in 1..order).
  std::uint64_t count(const TextSeq& gram) const;
  /// Context entry for an order-k model, with |context| == k - 1.
  const ContextEntry* context(std::span<const std::string> context) const;

  /// Calls visit(gram, count) for every stored k-gram in a canonical order.
  template <typename Visit>
  void forEachGram(Visit&& visit) const;

  friend bool operator==(const NgramCounts& a, const NgramCounts& b);

 private:
  int order_;
  std::vector<std::unordered_map<std::string, ContextEntry>> byOrder_;  // index k - 1
  std::set<std::string> vocab_;
};

struct NgramModel {
  NgramConfig config;
  NgramCounts counts;

  void save(const std::filesystem::path& file) const;
  static NgramModel load(const std::filesystem::path& file);
};

/// Throws Error when `methods` is empty.
NgramModel trainNgram(const std::vector<TextSeq>& methods, const NgramConfig& config = {});

/// Local counts for the cache component, disjoint from the model's counts.
NgramCounts buildCache(const NgramModel& model, const std::vector<TextSeq>& localFiles);

/// Interpolated probability of `candidate` after `context` (only the last
/// order-1 tokens matter). Orders whose context was never observed are
/// skipped, so the distribution over the vocabulary always sums to one.
/// With a non-empty cache the result is gamma * P_cache + (1 - gamma) * P_global,
/// gamma = c / (c + cacheK), c = cache count of the longest observed context
/// suffix. Tokens outside the vocabulary get probability 0.
double prob(const NgramModel& model, std::span<const std::string> context, const std::string& candidate,
            const NgramCounts* cache = nullptr);

/// Vocabulary over which prob() sums to one: the model vocabulary, plus the
/// cache vocabulary when a cache is given.
std::set<std::string> predictionVocab(const NgramModel& model, const NgramCounts* cache = nullptr);

/// Most probable next token (ties: smallest text).
std::string predictNext(const NgramModel& model, std::span<const std::string> context,
                        const NgramCounts* cache = nullptr);

struct SpanPredictionOptions {
  const NgramCounts* cache = nullptr;
  // Condition later positions on the true masked tokens instead of on the
  // model's own earlier predictions. Leaks the answer; off by default.
  bool teacherContext = false;
};

/// Argmax queries against one model and optional cache. Construction ranks
/// the unigram vocabulary once; reuse one predictor across instances.
class NgramPredictor {
 public:
  explicit NgramPredictor(const NgramModel& model, const NgramCounts* cache = nullptr);

  std::string next(std::span<const std::string> context) const;

  /// Predicts exactly `length` tokens left to right from the prefix. The
  /// suffix is never consulted. `truth` is required with teacherContext.
  TextSeq span(const TextSeq& prefix, std::size_t length, bool teacherContext = false,
               const TextSeq* truth = nullptr) const;

 private:
  const NgramModel& model_;
  const NgramCounts* cache_;
  std::size_t unionVocab_;
  std::vector<std::pair<std::uint64_t, const std::string*>> ranking_;
};

TextSeq predictSpan(const NgramModel& model, const TextSeq& prefix, std::size_t length,
                    const SpanPredictionOptions& options = {}, const TextSeq* truth = nullptr);

template <typename Visit>
void NgramCounts::forEachGram(Visit&& visit) const {
  for (std::size_t k = 0; k < byOrder_.size(); ++k) {
    std::vector<const std::string*> contexts;
    for (const auto& [ctx, entry] : byOrder_[k]) contexts.push_back(&ctx);
    std::sort(contexts.begin(), contexts.end(), [](const auto* a, const auto* b) { return *a < *b; });
    for (const std::string* ctx : contexts) {
      const auto& entry = byOrder_[k].at(*ctx);
      std::vector<const std::string*> words;
      for (const auto& [w, c] : entry.next) words.push_back(&w);
      std::sort(words.begin(), words.end(), [](const auto* a, const auto* b) { return *a < *b; });
      TextSeq gram;
      std::size_t from = 0;
      while (from < ctx->size()) {
        const auto sep = ctx->find('\x1f', from);
        gram.push_back(ctx->substr(from, sep - from));
        from = sep + 1;
      }
      for (const std::string* w : words) {
        gram.push_back(*w);
        visit(gram, entry.next.at(*w));
        gram.pop_back();
      }
    }
  }
}

}  // namespace codemask
