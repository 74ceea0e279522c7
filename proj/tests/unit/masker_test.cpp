#include <gtest/gtest.h>

#include <map>
#include <set>

#include "codemask/masker.hpp"
#include "test_support.hpp"

using namespace codemask;

namespace {

MethodRecord abstracted(std::string id, std::string code) {
  auto r = makeRecord(std::move(id), "java", std::move(code));
  abstractRecord(r);
  return r;
}

}  // namespace

TEST(Mask, RatioRule) {
  EXPECT_TRUE(satisfiesMaskRatio(5, 10));
  EXPECT_FALSE(satisfiesMaskRatio(6, 11));
  EXPECT_TRUE(satisfiesMaskRatio(0, 0));
}

TEST(Mask, TokenLengthRange) {
  std::map<std::size_t, int> seen;
  for (int line = 1; line <= 4000; ++line) {
    const auto x = tokenMaskLength(11, "m", line, 5);
    ASSERT_GE(x, 1u);
    ASSERT_LE(x, 4u);
    ++seen[x];
    EXPECT_LE(tokenMaskLength(11, "m", line, 30), 10u);
    EXPECT_EQ(tokenMaskLength(11, "m", line, 2), 1u);
  }
  EXPECT_EQ(seen.size(), 4u);
  for (const auto& [x, n] : seen) EXPECT_NEAR(n, 1000, 150) << x;
  EXPECT_EQ(tokenMaskLength(11, "m", 3, 9), tokenMaskLength(11, "m", 3, 9));
}

TEST(Mask, TokenMasksLineSuffix) {
  const std::string code =
      "void f() {\n"
      "  int i = 0;\n"
      "  a = b + c + d + e;\n"
      "  g(i, a, b, c, d, e, h, k, m, n, p, q, r);\n"
      "}\n";
  const auto rec = abstracted("fx", code);
  std::uint64_t seed = 0;
  while (tokenMaskLength(seed, "fx", 2, 5) != 2) ++seed;
  const auto instances = maskTokens(rec, seed, Representation::Raw);
  bool foundLine2 = false;
  for (const auto& inst : instances) {
    EXPECT_EQ(inst.site.level, MaskLevel::Token);
    if (inst.site.line == 2) {
      foundLine2 = true;
      EXPECT_EQ(inst.masked, (TextSeq{"0", ";"}));
    }
    // the closing "}" line never yields an instance
    EXPECT_NE(inst.site.line, 5);
  }
  EXPECT_TRUE(foundLine2);
}

TEST(Mask, TokenCapAtTen) {
  std::string code = "void f() {\n  g(";
  for (int i = 0; i < 14; ++i) code += "a" + std::to_string(i) + ", ";
  code += "z);\n  x++;\n  y++;\n  w++;\n  v++;\n  u++;\n  t++;\n  s++;\n  r++;\n  q++;\n  p++;\n  o++;\n  n++;\n}\n";
  const auto rec = makeRecord("cap", "java", code);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (const auto& inst : maskTokens(rec, seed, Representation::Raw)) {
      EXPECT_LE(inst.masked.size(), kMaxMaskedTokens);
      if (inst.site.line == 2) {
        EXPECT_EQ(inst.masked.size(), std::min<std::size_t>(tokenMaskLength(seed, "cap", 2, 33), 10));
      }
    }
  }
}

TEST(Mask, Constructs) {
  const auto rec = abstracted("c", "void f() {\n  copyFile(source, target);\n  int x = 1;\n  int y = 2;\n}\n");
  const auto instances = maskConstructs(rec, Representation::Raw);
  ASSERT_EQ(instances.size(), 1u);
  EXPECT_EQ(instances[0].masked, (TextSeq{"source", ",", "target"}));
  EXPECT_EQ(instances[0].site.construct, ConstructKind::CallArguments);

  const auto abs = maskConstructs(rec, Representation::Abstract);
  ASSERT_EQ(abs.size(), 1u);
  EXPECT_EQ(abs[0].masked, (TextSeq{"VAR_1", ",", "VAR_2"}));
}

TEST(Mask, ElevenTokenForControlDropped) {
  // "int i = 0 ; i < n ; i ++" is 11 tokens
  const auto rec = makeRecord("f", "java",
                              "void f() {\n  for (int i = 0; i < n; i++) {\n    a(i);\n  }\n  b = c;\n  d = e;\n"
                              "  g = h;\n  k = m;\n}\n");
  const auto instances = maskConstructs(rec, Representation::Raw);
  ASSERT_EQ(instances.size(), 1u);
  EXPECT_EQ(instances[0].masked, (TextSeq{"i"}));
}

TEST(Mask, ThreeEligibleConstructs) {
  const auto rec = makeRecord("t", "java",
                              "void f() {\n  if (a) {\n    b(c);\n  }\n  while (d) {\n    e++;\n  }\n"
                              "  x = 1;\n  y = 2;\n  z = 3;\n}\n");
  EXPECT_EQ(maskConstructs(rec, Representation::Raw).size(), 3u);
}

TEST(Mask, Blocks) {
  const auto rec = makeRecord("b", "java",
                              "boolean f() {\n  if (x) {\n    return false;\n  }\n  a = b;\n  c = d;\n  e = g;\n"
                              "  h = k;\n  return true;\n}\n");
  const auto instances = maskBlocks(rec, Representation::Raw);
  // the body block has 6 statements and is not a candidate
  ASSERT_EQ(instances.size(), 1u);
  EXPECT_EQ(instances[0].masked, (TextSeq{"{", "return", "false", ";", "}"}));
  EXPECT_EQ(instances[0].site.statementCount, 1);
}

TEST(Mask, ThreeStatementLoopBodyDropped) {
  const auto rec =
      makeRecord("l", "java", "void f() {\n  while (x) {\n    a++;\n    b++;\n    c++;\n  }\n  d++;\n  e++;\n}\n");
  const auto sites = blockSites(rec);
  for (const auto& s : sites) EXPECT_LE(s.statementCount, kMaxBlockStatements);
  EXPECT_TRUE(sites.empty());
}

TEST(Mask, MethodBodyDroppedByRatio) {
  const auto rec = makeRecord("r", "java", "void f() {\n  a++;\n  b++;\n}\n");
  ASSERT_EQ(blockSites(rec).size(), 1u);
  EXPECT_TRUE(maskBlocks(rec, Representation::Raw).empty());
}

TEST(Mask, RenderInput) {
  MaskedInstance inst;
  inst.prefix = {"return"};
  inst.masked = {"x", ";"};
  EXPECT_EQ(renderInput(inst), (TextSeq{"return", std::string(kMaskSentinel)}));
  inst.masked = TextSeq(10, "t");
  inst.suffix = {"}"};
  EXPECT_EQ(renderInput(inst), (TextSeq{"return", std::string(kMaskSentinel), "}"}));
}

TEST(Mask, InstanceIdsUnique) {
  for (auto level : {MaskLevel::Token, MaskLevel::Construct, MaskLevel::Block}) {
    std::set<std::string> seen;
    for (const auto& inst : maskCorpus(test::fixtureMethods(), level, Representation::Raw, 7))
      EXPECT_TRUE(seen.insert(inst.instanceId).second) << inst.instanceId;
  }
}

TEST(Mask, ParallelMatchesSerial) {
  std::vector<MethodRecord> recs = test::fixtureMethods();
  for (auto& r : recs) abstractRecord(r);
  for (auto level : {MaskLevel::Token, MaskLevel::Construct, MaskLevel::Block}) {
    const auto a = maskCorpus(recs, level, Representation::Abstract, 3, 1);
    const auto b = maskCorpus(recs, level, Representation::Abstract, 3, 4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].instanceId, b[i].instanceId);
      EXPECT_EQ(a[i].masked, b[i].masked);
    }
  }
}

TEST(MaskProperty, InstanceInvariants) {
  std::vector<MethodRecord> recs = test::fixtureMethods();
  for (const auto& r : test::miniCorpus()) recs.push_back(r);
  for (auto& r : recs) abstractRecord(r);
  for (auto level : {MaskLevel::Token, MaskLevel::Construct, MaskLevel::Block}) {
    const auto raw = maskCorpus(recs, level, Representation::Raw, 5);
    const auto abs = maskCorpus(recs, level, Representation::Abstract, 5);
    ASSERT_EQ(raw.size(), abs.size());
    std::map<std::string, const MethodRecord*> byId;
    for (const auto& r : recs) byId[r.methodId] = &r;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const auto& inst = raw[i];
      const auto& rec = *byId.at(inst.methodId);
      EXPECT_EQ(inst.methodTokens(), texts(rec.rawTokens));
      EXPECT_EQ(abs[i].methodTokens(), texts(rec.abstractTokens));
      EXPECT_EQ(inst.prefix.size(), inst.site.start);
      EXPECT_EQ(inst.prefix.size() + inst.masked.size(), inst.site.end);
      EXPECT_EQ(inst.site, abs[i].site);
      EXPECT_EQ(inst.methodId, abs[i].methodId);
      EXPECT_EQ(inst.masked.size(), abs[i].masked.size());
      EXPECT_GE(inst.masked.size(), 1u);
      EXPECT_TRUE(satisfiesMaskRatio(inst.masked.size(), inst.methodLength()));
      if (level != MaskLevel::Block) {
        EXPECT_LE(inst.masked.size(), kMaxMaskedTokens);
      } else {
        EXPECT_LE(inst.site.statementCount, kMaxBlockStatements);
        EXPECT_EQ(inst.masked.front(), "{");
        EXPECT_EQ(inst.masked.back(), "}");
      }
    }
  }
}

TEST(MaskProperty, TokenCountLaw) {
  for (const auto& rec : test::miniCorpus()) {
    std::size_t expected = 0;
    for (const auto& g : segmentLines(rec.rawTokens)) {
      if (g.size() <= 1) continue;
      const auto x = tokenMaskLength(9, rec.methodId, g.line - rec.rawTokens.front().line + 1, g.size());
      if (satisfiesMaskRatio(x, rec.rawTokens.size())) ++expected;
    }
    EXPECT_EQ(maskTokens(rec, 9, Representation::Raw).size(), expected) << rec.methodId;
  }
}
