#include "codemask/ngram.hpp"

#include <cmath>

#include "codemask/error.hpp"
#include "codemask/jsonl.hpp"

namespace codemask {

namespace {

std::string contextKey(std::span<const std::string> context) {
  std::string key;
  for (const auto& t : context) {
    key += t;
    key.push_back('\x1f');
  }
  return key;
}

std::span<const std::string> lastN(std::span<const std::string> context, std::size_t n) {
  return n >= context.size() ? context : context.subspan(context.size() - n);
}

// Jelinek-Mercer interpolation over the orders whose context was observed.
class Interpolator {
 public:
  Interpolator(const NgramCounts& counts, std::span<const std::string> context, double lambda, std::size_t vocabSize)
      : lambda_(lambda), base_(1.0 / static_cast<double>(vocabSize)) {
    for (int k = 1; k <= counts.order(); ++k) {
      const auto need = static_cast<std::size_t>(k - 1);
      if (need > context.size()) break;
      const auto* entry = counts.context(lastN(context, need));
      if (entry && entry->total > 0) active_.push_back(entry);
    }
  }

  double operator()(const std::string& word) const {
    double p = base_;
    for (const auto* entry : active_) {
      const auto it = entry->next.find(word);
      const double mle =
          it == entry->next.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(entry->total);
      p = lambda_ * mle + (1.0 - lambda_) * p;
    }
    return p;
  }

  const std::vector<const NgramCounts::ContextEntry*>& active() const noexcept { return active_; }

 private:
  double lambda_;
  double base_;
  std::vector<const NgramCounts::ContextEntry*> active_;
};

double cacheWeight(const NgramCounts& cache, std::span<const std::string> context, double cacheK) {
  const auto longest = std::min<std::size_t>(context.size(), static_cast<std::size_t>(cache.order() - 1));
  for (std::size_t len = longest; len >= 1; --len) {
    if (const auto* entry = cache.context(lastN(context, len))) {
      const auto c = static_cast<double>(entry->total);
      return c / (c + cacheK);
    }
  }
  return 0.0;
}

// Scores candidates for one context; shared by prob() and argmax.
class Scorer {
 public:
  Scorer(const NgramModel& model, std::span<const std::string> context, const NgramCounts* cache,
         std::size_t unionVocab)
      : model_(model), global_(model.counts, context, model.config.lambda, model.counts.vocab().size()) {
    if (cache && !cache->empty()) {
      gamma_ = cacheWeight(*cache, context, model.config.cacheK);
      if (gamma_ > 0.0) {
        cache_.emplace(*cache, context, model.config.lambda, unionVocab);
        cacheCounts_ = cache;
      }
    }
  }

  double operator()(const std::string& word) const {
    const bool inModel = model_.counts.vocab().contains(word);
    const double global = inModel ? global_(word) : 0.0;
    if (!cache_) return global;
    const bool inCache = cacheCounts_->vocab().contains(word);
    if (!inModel && !inCache) return 0.0;
    return gamma_ * (*cache_)(word) + (1.0 - gamma_) * global;
  }

  const Interpolator& global() const noexcept { return global_; }
  const Interpolator* cache() const noexcept { return cache_ ? &*cache_ : nullptr; }

 private:
  const NgramModel& model_;
  Interpolator global_;
  std::optional<Interpolator> cache_;
  const NgramCounts* cacheCounts_ = nullptr;
  double gamma_ = 0.0;
};

std::size_t unionVocabSize(const NgramModel& model, const NgramCounts* cache) {
  if (!cache || cache->empty()) return model.counts.vocab().size();
  std::size_t extra = 0;
  for (const auto& w : cache->vocab()) {
    if (!model.counts.vocab().contains(w)) ++extra;
  }
  return model.counts.vocab().size() + extra;
}

}  // namespace

void NgramConfig::validate() const {
  if (order < 1) throw Error("n-gram order must be >= 1");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw Error("lambda must be in (0, 1]");
  if (!(cacheK > 0.0)) throw Error("cache-k must be positive");
}

NgramCounts::NgramCounts(int order) : order_(order), byOrder_(static_cast<std::size_t>(std::max(order, 1))) {
  if (order < 1) throw Error("n-gram order must be >= 1");
}

void NgramCounts::addSequence(const TextSeq& tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    vocab_.insert(tokens[i]);
    for (int k = 1; k <= order_ && static_cast<std::size_t>(k) <= i + 1; ++k) {
      const auto ctxLen = static_cast<std::size_t>(k - 1);
      auto& entry = byOrder_[static_cast<std::size_t>(k - 1)]
                            [contextKey(std::span<const std::string>(tokens).subspan(i - ctxLen, ctxLen))];
      ++entry.total;
      ++entry.next[tokens[i]];
    }
  }
}

void NgramCounts::addCount(const TextSeq& gram, std::uint64_t count) {
  if (gram.empty() || gram.size() > static_cast<std::size_t>(order_)) {
    throw Error("gram length " + std::to_string(gram.size()) + " outside 1.." + std::to_string(order_));
  }
  for (const auto& t : gram) vocab_.insert(t);
  const std::span<const std::string> all(gram);
  auto& entry = byOrder_[gram.size() - 1][contextKey(all.first(gram.size() - 1))];
  entry.total += count;
  entry.next[gram.back()] += count;
}

void NgramCounts::merge(const NgramCounts& other) {
  if (other.order_ != order_) throw Error("cannot merge n-gram counts of different orders");
  for (std::size_t k = 0; k < byOrder_.size(); ++k) {
    for (const auto& [ctx, entry] : other.byOrder_[k]) {
      auto& mine = byOrder_[k][ctx];
      mine.total += entry.total;
      for (const auto& [w, c] : entry.next) mine.next[w] += c;
    }
  }
  vocab_.insert(other.vocab_.begin(), other.vocab_.end());
}

void NgramCounts::subtract(const NgramCounts& other) {
  if (other.order_ != order_) throw Error("cannot subtract n-gram counts of different orders");
  for (std::size_t k = 0; k < byOrder_.size(); ++k) {
    for (const auto& [ctx, entry] : other.byOrder_[k]) {
      const auto it = byOrder_[k].find(ctx);
      if (it == byOrder_[k].end() || it->second.total < entry.total) throw Error("subtracting absent n-gram counts");
      auto& mine = it->second;
      for (const auto& [w, c] : entry.next) {
        const auto wit = mine.next.find(w);
        if (wit == mine.next.end() || wit->second < c) throw Error("subtracting absent n-gram counts");
        wit->second -= c;
        if (wit->second == 0) mine.next.erase(wit);
      }
      mine.total -= entry.total;
      if (mine.total == 0) byOrder_[k].erase(it);
    }
  }
  vocab_.clear();
  for (const auto& [_, entry] : byOrder_[0]) {
    for (const auto& [w, c] : entry.next) vocab_.insert(w);
  }
}

std::uint64_t NgramCounts::count(const TextSeq& gram) const {
  if (gram.empty() || gram.size() > static_cast<std::size_t>(order_)) return 0;
  const std::span<const std::string> all(gram);
  const auto* entry = context(all.first(gram.size() - 1));
  if (!entry) return 0;
  const auto it = entry->next.find(gram.back());
  return it == entry->next.end() ? 0 : it->second;
}

const NgramCounts::ContextEntry* NgramCounts::context(std::span<const std::string> ctx) const {
  if (ctx.size() >= static_cast<std::size_t>(order_)) return nullptr;
  const auto& table = byOrder_[ctx.size()];
  const auto it = table.find(contextKey(ctx));
  return it == table.end() ? nullptr : &it->second;
}

bool operator==(const NgramCounts& a, const NgramCounts& b) {
  if (a.order_ != b.order_ || a.vocab_ != b.vocab_) return false;
  for (std::size_t k = 0; k < a.byOrder_.size(); ++k) {
    if (a.byOrder_[k].size() != b.byOrder_[k].size()) return false;
    for (const auto& [ctx, entry] : a.byOrder_[k]) {
      const auto it = b.byOrder_[k].find(ctx);
      if (it == b.byOrder_[k].end() || it->second.total != entry.total || it->second.next != entry.next) {
        return false;
      }
    }
  }
  return true;
}

void NgramModel::save(const std::filesystem::path& file) const {
  JsonlWriter out(file);
  Json header;
  header["v"] = kFormatVersion;
  header["kind"] = "ngram-model";
  header["order"] = config.order;
  header["lambda"] = config.lambda;
  header["cache_k"] = config.cacheK;
  header["smoothing"] = "jelinek-mercer";
  header["vocab"] = counts.vocab().size();
  out.write(header);
  counts.forEachGram([&](const TextSeq& gram, std::uint64_t c) {
    Json rec;
    rec["gram"] = gram;
    rec["c"] = c;
    out.write(rec);
  });
}

NgramModel NgramModel::load(const std::filesystem::path& file) {
  std::optional<NgramModel> model;
  readJsonl(file, [&](const Json& rec, std::size_t lineNo) {
    const auto where = file.string() + ":" + std::to_string(lineNo);
    if (!model) {
      checkFormatVersion(rec, where);
      if (rec.value("kind", "") != "ngram-model") throw FormatError(where + ": not an n-gram model header");
      NgramConfig cfg;
      cfg.order = rec.at("order").get<int>();
      cfg.lambda = rec.at("lambda").get<double>();
      cfg.cacheK = rec.at("cache_k").get<double>();
      cfg.validate();
      model.emplace(NgramModel{cfg, NgramCounts(cfg.order)});
      return;
    }
    try {
      model->counts.addCount(rec.at("gram").get<TextSeq>(), rec.at("c").get<std::uint64_t>());
    } catch (const Json::exception&) {
      throw FormatError(where + ": malformed gram record");
    }
  });
  if (!model) throw FormatError(file.string() + ": empty model file");
  return std::move(*model);
}

NgramModel trainNgram(const std::vector<TextSeq>& methods, const NgramConfig& config) {
  config.validate();
  if (methods.empty()) throw Error("n-gram training corpus is empty");
  NgramModel model{config, NgramCounts(config.order)};
  for (const auto& m : methods) model.counts.addSequence(m);
  if (model.counts.empty()) throw Error("n-gram training corpus has no tokens");
  return model;
}

NgramCounts buildCache(const NgramModel& model, const std::vector<TextSeq>& localFiles) {
  NgramCounts cache(model.config.order);
  for (const auto& f : localFiles) cache.addSequence(f);
  return cache;
}

double prob(const NgramModel& model, std::span<const std::string> context, const std::string& candidate,
            const NgramCounts* cache) {
  const Scorer score(model, context, cache, unionVocabSize(model, cache));
  return score(candidate);
}

std::set<std::string> predictionVocab(const NgramModel& model, const NgramCounts* cache) {
  std::set<std::string> vocab = model.counts.vocab();
  if (cache) vocab.insert(cache->vocab().begin(), cache->vocab().end());
  return vocab;
}

NgramPredictor::NgramPredictor(const NgramModel& model, const NgramCounts* cache)
    : model_(model), cache_(cache), unionVocab_(unionVocabSize(model, cache)) {
  if (const auto* unigrams = model.counts.context({})) {
    for (const auto& [w, c] : unigrams->next) ranking_.emplace_back(c, &w);
    std::sort(ranking_.begin(), ranking_.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : *a.second < *b.second;
    });
  }
}

std::string NgramPredictor::next(std::span<const std::string> context) const {
  const Scorer score(model_, context, cache_, unionVocab_);
  std::unordered_map<std::string_view, bool> candidates;
  const auto& globalActive = score.global().active();
  // Order 1 (empty context) is handled through the unigram ranking below.
  for (std::size_t a = 0; a < globalActive.size(); ++a) {
    if (a == 0 && globalActive[a] == model_.counts.context({})) continue;
    for (const auto& [w, c] : globalActive[a]->next) candidates.emplace(w, true);
  }
  if (const auto* cacheScore = score.cache()) {
    for (const auto* entry : cacheScore->active()) {
      for (const auto& [w, c] : entry->next) candidates.emplace(w, true);
    }
  }
  for (const auto& [c, w] : ranking_) {
    if (!candidates.contains(*w)) {
      candidates.emplace(*w, true);
      break;
    }
  }

  const std::string* best = nullptr;
  double bestScore = -1.0;
  std::string bestText;
  for (const auto& [w, unused] : candidates) {
    const std::string word(w);
    const double s = score(word);
    if (s > bestScore || (s == bestScore && word < bestText)) {
      bestScore = s;
      bestText = word;
      best = &bestText;
    }
  }
  if (!best) throw Error("n-gram model has an empty vocabulary");
  return bestText;
}

TextSeq NgramPredictor::span(const TextSeq& prefix, std::size_t length, bool teacherContext,
                             const TextSeq* truth) const {
  if (teacherContext && (!truth || truth->size() < length)) {
    throw Error("teacher context needs the true masked tokens");
  }
  const auto window = static_cast<std::size_t>(std::max(model_.config.order - 1, 0));
  TextSeq context(prefix.end() - static_cast<std::ptrdiff_t>(std::min(window, prefix.size())), prefix.end());
  TextSeq out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    out.push_back(next(context));
    context.push_back(teacherContext ? (*truth)[i] : out.back());
    if (context.size() > window) context.erase(context.begin());
  }
  return out;
}

std::string predictNext(const NgramModel& model, std::span<const std::string> context, const NgramCounts* cache) {
  return NgramPredictor(model, cache).next(context);
}

TextSeq predictSpan(const NgramModel& model, const TextSeq& prefix, std::size_t length,
                    const SpanPredictionOptions& options, const TextSeq* truth) {
  return NgramPredictor(model, options.cache).span(prefix, length, options.teacherContext, truth);
}

}  // namespace codemask
