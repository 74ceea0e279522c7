#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "codemask/corpus.hpp"
#include "codemask/error.hpp"
#include "test_support.hpp"

using namespace codemask;

namespace {

std::string methodOfLines(const std::string& name, int lines) {
  std::string code = "void " + name + "() {\n";
  for (int i = 0; i < lines - 2; ++i) code += "  x++;\n";
  return code + "}\n";
}

std::vector<std::string> ids(const std::vector<MethodRecord>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(r.methodId);
  return out;
}

}  // namespace

TEST(Ingest, Jsonl) {
  const auto dir = test::scratchDir("ingest-jsonl");
  std::ofstream(dir / "c.jsonl") << R"({"id":"a","domain":"java","code":"void a() {\n x();\n}"})"
                                    "\n"
                                 << R"({"id":"b","code":"void b() {\n y();\n}"})"
                                    "\n"
                                 << "\n"
                                 << R"({"id":"c","domain":"android","code":"void c() {\n z();\n}"})"
                                    "\n";
  const auto r = ingest(dir / "c.jsonl");
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.records[1].domainTag, "java");
  EXPECT_EQ(r.records[2].domainTag, "android");
  EXPECT_EQ(r.records[0].name, "a");
  EXPECT_EQ(r.skipped, 0u);
}

TEST(Ingest, SkipsUnlexableAndMalformed) {
  const auto dir = test::scratchDir("ingest-skip");
  std::ofstream(dir / "c.jsonl") << R"({"id":"a","code":"void a() { s = \"open; }"})"
                                    "\n"
                                 << "{not json\n"
                                 << R"({"id":"b","code":"void b() {\n y();\n}"})"
                                    "\n";
  const auto r = ingest(dir / "c.jsonl");
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.skipped, 2u);
  EXPECT_EQ(r.diagnostics.size(), 2u);
}

TEST(Ingest, Directory) {
  const auto dir = test::scratchDir("ingest-dir");
  std::filesystem::create_directories(dir / "src");
  std::ofstream(dir / "src" / "A.java")
      << "class A {\n  void f() {\n    a();\n  }\n  int g() {\n    return 1;\n  }\n}\n";
  const auto r = ingest(dir / "src");
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[0].name, "f");
  EXPECT_EQ(r.records[1].name, "g");
  EXPECT_NE(r.records[0].methodId, r.records[1].methodId);
}

TEST(Ingest, MissingSourceThrows) { EXPECT_THROW(ingest("/nonexistent/corpus.jsonl"), Error); }

TEST(Filter, Rules) {
  EXPECT_FALSE(passesFilter(makeRecord("1", "java", methodOfLines("testFoo", 5))));
  EXPECT_FALSE(passesFilter(makeRecord("2", "java", methodOfLines("latest", 5))));
  EXPECT_FALSE(passesFilter(makeRecord("3", "java", methodOfLines("TESTING", 5))));
  EXPECT_FALSE(passesFilter(makeRecord("4", "java", "public String toString() {\n  return s;\n  }\n")));
  EXPECT_FALSE(passesFilter(makeRecord("5", "java", "void f() {\n}\n")));
  EXPECT_TRUE(passesFilter(makeRecord("6", "java", methodOfLines("run", 3))));
}

TEST(Filter, TokenLimit) {
  // header "void f ( ) {" = 5, closing "}" = 1, each "x ++ ;" = 3
  std::string at100 = "void f() {\n";
  for (int i = 0; i < 30; ++i) at100 += "x++;\n";
  at100 += "a = b;\n}\n";
  const auto r100 = makeRecord("a", "java", at100);
  ASSERT_EQ(r100.rawTokens.size(), 100u);
  EXPECT_TRUE(passesFilter(r100));
  std::string at101 = "void f() {\n";
  for (int i = 0; i < 31; ++i) at101 += "x++;\n";
  at101 += "y;\n}\n";
  const auto r101 = makeRecord("b", "java", at101);
  ASSERT_EQ(r101.rawTokens.size(), 101u);
  EXPECT_FALSE(passesFilter(r101));
}

TEST(Filter, Idempotent) {
  auto once = filterRecords(ingest(test::dataDir() / "mini_corpus.jsonl").records);
  auto twice = filterRecords(once);
  EXPECT_EQ(ids(once), ids(twice));
}

TEST(Dedup, ExactAndAbstract) {
  std::vector<MethodRecord> rs{makeRecord("a", "java", "void f() {\n  total = x + 1;\n}"),
                               makeRecord("b", "java", "void f() {\n  total = x + 1;\n}"),
                               makeRecord("c", "java", "void f() {\n  sum = y + 1;\n}"),
                               makeRecord("d", "java", "void g() {\n  run();\n}")};
  EXPECT_EQ(dedup(rs, Representation::Raw, 1).size(), 3u);
  for (auto& r : rs) abstractRecord(r);
  const auto kept = dedup(rs, Representation::Abstract, 1);
  EXPECT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept.back().methodId, "d");

  std::vector<MethodRecord> distinct{rs[0], rs[3], makeRecord("e", "java", "void h() {\n  stop();\n}")};
  EXPECT_EQ(dedup(distinct, Representation::Raw, 9).size(), 3u);
}

TEST(Dedup, IdempotentAndOrderInsensitive) {
  auto rs = test::miniCorpus();
  const auto once = dedup(rs, Representation::Raw, 3);
  EXPECT_EQ(ids(dedup(once, Representation::Raw, 3)), ids(once));

  std::reverse(rs.begin(), rs.end());
  auto reversed = ids(dedup(rs, Representation::Raw, 3));
  auto forward = ids(once);
  std::sort(reversed.begin(), reversed.end());
  std::sort(forward.begin(), forward.end());
  EXPECT_EQ(reversed, forward);
}

TEST(Split, Sizes) {
  const auto s10 = splitSizes(10);
  EXPECT_EQ(s10.train, 8u);
  EXPECT_EQ(s10.eval, 1u);
  EXPECT_EQ(s10.test, 1u);
  const auto big = splitSizes(654224);
  EXPECT_EQ(big.train, 523379u);
  EXPECT_EQ(big.eval, 65422u);
  EXPECT_EQ(big.test, 65423u);
}

TEST(Split, DeterministicAndDisjoint) {
  std::vector<std::string> idsIn;
  for (int i = 0; i < 57; ++i) idsIn.push_back("m" + std::to_string(i));
  const auto a = splitMethods(idsIn, 5);
  std::reverse(idsIn.begin(), idsIn.end());
  const auto b = splitMethods(idsIn, 5);
  ASSERT_EQ(a.size(), b.size());
  std::set<std::string> seen;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].methodId, b[i].methodId);
    EXPECT_EQ(a[i].split, b[i].split);
    EXPECT_TRUE(seen.insert(a[i].methodId).second);
  }
  EXPECT_EQ(seen.size(), 57u);
  EXPECT_THROW(splitMethods({"a", "b", "c"}, 1), Error);
}

TEST(Cap, Rules) {
  std::vector<int> items(100);
  for (int i = 0; i < 100; ++i) items[i] = i;
  EXPECT_EQ(capTraining(items, 750000, 1), items);
  const auto a = capTraining(items, 30, 4);
  const auto b = capTraining(items, 30, 4);
  EXPECT_EQ(a.size(), 30u);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_THROW(capTraining(items, 0, 1), Error);
  EXPECT_EQ(cappedIndices(800000, 750000, 1).size(), 750000u);
}
