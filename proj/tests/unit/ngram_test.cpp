#include <gtest/gtest.h>

#include "codemask/error.hpp"
#include "codemask/ngram.hpp"
#include "codemask/random.hpp"
#include "test_support.hpp"

using namespace codemask;
using test::words;

namespace {

double mass(const NgramModel& m, const TextSeq& ctx, const NgramCounts* cache = nullptr) {
  double sum = 0.0;
  for (const auto& w : predictionVocab(m, cache)) sum += prob(m, ctx, w, cache);
  return sum;
}

std::vector<TextSeq> miniTexts(std::size_t limit) {
  std::vector<TextSeq> out;
  for (const auto& r : test::miniCorpus()) {
    if (out.size() == limit) break;
    out.push_back(texts(r.rawTokens));
  }
  return out;
}

}  // namespace

TEST(Ngram, Counts) {
  const auto m = trainNgram({words("a b c a b c")}, {2, 0.5, 10});
  EXPECT_EQ(m.counts.count({"a", "b"}), 2u);
  EXPECT_EQ(m.counts.count({"c", "a"}), 1u);
  EXPECT_EQ(m.counts.count({"b"}), 2u);
  EXPECT_EQ(m.counts.count({"b", "a"}), 0u);
  EXPECT_EQ(m.counts.vocab(), (std::set<std::string>{"a", "b", "c"}));
  EXPECT_THROW(trainNgram({}), Error);
}

TEST(Ngram, NoContextAcrossSequences) {
  const auto m = trainNgram({words("a b"), words("c d")}, {2, 0.5, 10});
  EXPECT_EQ(m.counts.count({"b", "c"}), 0u);
}

TEST(Ngram, SingleContinuation) {
  const auto m = trainNgram({words("a b c a b c")}, {2, 1.0, 10});
  EXPECT_DOUBLE_EQ(prob(m, words("a"), "b"), 1.0);
  EXPECT_DOUBLE_EQ(prob(m, words("a"), "c"), 0.0);
  const auto half = trainNgram({words("a b c a b c")}, {2, 0.5, 10});
  EXPECT_NEAR(prob(half, words("a"), "b"), 0.5 + 0.5 * (2.0 / 6.0), 1e-12);
}

TEST(Ngram, UnseenContextFallsBack) {
  const auto m = trainNgram({words("a b c a b c")}, {2, 0.5, 10});
  for (const auto* w : {"a", "b", "c"}) {
    EXPECT_DOUBLE_EQ(prob(m, words("zz"), w), prob(m, {}, w));
  }
  EXPECT_DOUBLE_EQ(prob(m, words("a"), "zz"), 0.0);
}

TEST(Ngram, OnlyTheLastTokensMatter) {
  const auto m = trainNgram({words("a b c d a b c e")}, {3, 0.5, 10});
  EXPECT_DOUBLE_EQ(prob(m, words("x y b c"), "d"), prob(m, words("b c"), "d"));
}

TEST(Ngram, UnigramFrequencies) {
  const auto m = trainNgram({words("a b a c a b")}, {1, 1.0, 10});
  EXPECT_DOUBLE_EQ(prob(m, {}, "a"), 3.0 / 6.0);
  EXPECT_DOUBLE_EQ(prob(m, words("b"), "b"), 2.0 / 6.0);
  EXPECT_DOUBLE_EQ(prob(m, {}, "c"), 1.0 / 6.0);
}

TEST(Ngram, PredictSpan) {
  const auto m = trainNgram({words("a b c a b c")}, {2, 0.5, 10});
  EXPECT_EQ(predictSpan(m, words("a"), 1), (TextSeq{"b"}));
  EXPECT_EQ(predictSpan(m, words("a"), 3), (TextSeq{"b", "c", "a"}));
  EXPECT_TRUE(predictSpan(m, words("a"), 0).empty());
  const NgramPredictor p(m);
  EXPECT_EQ(p.span(words("c"), 2), (TextSeq{"a", "b"}));
  EXPECT_EQ(p.next(words("b")), "c");
}

TEST(Ngram, TeacherContext) {
  const auto m = trainNgram({words("a b c a b c"), words("x c a")}, {2, 1.0, 10});
  const TextSeq truth{"x", "c"};
  SpanPredictionOptions opts;
  opts.teacherContext = true;
  const auto out = predictSpan(m, words("b"), 2, opts, &truth);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], "c");
  // the second position sees the true "x", whose only continuation is "c"
  EXPECT_EQ(out[1], "c");
  EXPECT_THROW(predictSpan(m, words("b"), 2, opts, nullptr), Error);
}

TEST(Ngram, CacheOverridesGlobal) {
  std::vector<TextSeq> train(20, words("x z x z"));
  const auto m = trainNgram(train, {2, 0.5, 1.0});
  EXPECT_EQ(predictSpan(m, words("x"), 1), (TextSeq{"z"}));
  const auto cache = buildCache(m, std::vector<TextSeq>(50, words("x y x y")));
  SpanPredictionOptions opts;
  opts.cache = &cache;
  EXPECT_EQ(predictSpan(m, words("x"), 1, opts), (TextSeq{"y"}));
  EXPECT_NEAR(mass(m, words("x"), &cache), 1.0, 1e-9);
}

TEST(Ngram, EmptyCacheIsGlobal) {
  const auto m = trainNgram(miniTexts(200), {});
  const auto cache = buildCache(m, {});
  for (const auto& w : {"(", ")", ";", "int"}) {
    EXPECT_DOUBLE_EQ(prob(m, words("if ("), w, &cache), prob(m, words("if ("), w));
  }
  SpanPredictionOptions opts;
  opts.cache = &cache;
  EXPECT_EQ(predictSpan(m, words("public void"), 4, opts), predictSpan(m, words("public void"), 4));
}

TEST(Ngram, CacheOfTrainingCorpusEqualsGlobalCounts) {
  const auto corpus = miniTexts(100);
  const auto m = trainNgram(corpus, {});
  EXPECT_TRUE(buildCache(m, corpus) == m.counts);
}

TEST(Ngram, CacheCountsHandVerifiable) {
  const auto m = trainNgram({words("a b")}, {3, 0.5, 10});
  const auto cache = buildCache(m, {words("p q p q r")});
  EXPECT_EQ(cache.count({"p", "q"}), 2u);
  EXPECT_EQ(cache.count({"q", "p"}), 1u);
  EXPECT_EQ(cache.count({"p", "q", "r"}), 1u);
  EXPECT_EQ(cache.count({"q"}), 2u);
  EXPECT_EQ(cache.count({"a"}), 0u);
}

TEST(Ngram, MergeAndSubtract) {
  NgramCounts a(3);
  a.addSequence(words("a b c d"));
  NgramCounts b(3);
  b.addSequence(words("b c e"));
  NgramCounts merged = a;
  merged.merge(b);
  EXPECT_EQ(merged.count({"b", "c"}), 2u);
  merged.subtract(b);
  EXPECT_TRUE(merged == a);
  EXPECT_THROW(a.subtract(b), Error);
}

TEST(Ngram, ConfigValidation) {
  EXPECT_THROW((NgramConfig{0, 0.5, 10}).validate(), Error);
  EXPECT_THROW((NgramConfig{3, 0.0, 10}).validate(), Error);
  EXPECT_THROW((NgramConfig{3, 1.5, 10}).validate(), Error);
  EXPECT_THROW((NgramConfig{3, 0.5, -1}).validate(), Error);
  EXPECT_NO_THROW((NgramConfig{3, 1.0, 10}).validate());
}

TEST(Ngram, SaveLoad) {
  const auto m = trainNgram(miniTexts(50), {4, 0.7, 5});
  const auto dir = test::scratchDir("ngram");
  m.save(dir / "m.jsonl");
  const auto back = NgramModel::load(dir / "m.jsonl");
  EXPECT_EQ(back.config, m.config);
  EXPECT_TRUE(back.counts == m.counts);
}

TEST(NgramProperty, Normalization) {
  const auto corpus = miniTexts(300);
  Rng rng(5);
  for (int order : {1, 2, 3, 6}) {
    for (double lambda : {0.3, 1.0}) {
      const auto m = trainNgram(corpus, {order, lambda, 10});
      const auto cache = buildCache(m, {corpus[0], corpus[1], words("brand new tokens here")});
      const std::vector<std::string> vocab(m.counts.vocab().begin(), m.counts.vocab().end());
      for (int trial = 0; trial < 20; ++trial) {
        TextSeq ctx;
        if (trial % 2 == 0) {
          const auto& src = corpus[rng.below(corpus.size())];
          const auto end = 1 + rng.below(src.size() - 1);
          ctx.assign(src.begin(), src.begin() + end);
        } else {
          for (int k = 0; k < 5; ++k) ctx.push_back(vocab[rng.below(vocab.size())]);
        }
        EXPECT_NEAR(mass(m, ctx), 1.0, 1e-6);
        EXPECT_NEAR(mass(m, ctx, &cache), 1.0, 1e-6);
      }
    }
  }
}

TEST(NgramProperty, SpanLengthAndDeterminism) {
  const auto corpus = miniTexts(100);
  const auto m = trainNgram(corpus, {});
  const auto cache = buildCache(m, {corpus[3]});
  const NgramPredictor p(m, &cache);
  for (std::size_t k = 0; k <= 12; ++k) {
    const auto a = p.span(corpus[7], k);
    EXPECT_EQ(a.size(), k);
    EXPECT_EQ(a, p.span(corpus[7], k));
    SpanPredictionOptions opts;
    opts.cache = &cache;
    EXPECT_EQ(a, predictSpan(m, corpus[7], k, opts));
  }
}
