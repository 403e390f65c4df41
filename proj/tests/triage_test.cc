// Copyright 2026 The FuseFuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fusefuzz/triage.h"

#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"

#include "fusefuzz/error.h"
#include "support/synthetic_logs.h"

namespace fusefuzz {
namespace {

namespace fs = std::filesystem;

SanitizerFinding Finding(const std::string& path, int64_t line,
                         const std::string& kind) {
  SanitizerFinding f;
  f.kind = kind;
  f.site = {path, line, kind};
  return f;
}

class TriageTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fusefuzz_triage_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST(CrashStoreTest, SevenSitesHundredLogs) {
  Rng rng(42);
  CrashStore store;
  const auto& sites = testing::SevenSites();
  int fresh = 0;
  for (int i = 0; i < 100; ++i) {
    // Every site appears at least once.
    const auto& site = sites[i < 7 ? i : rng.Uniform(sites.size())];
    const auto findings = ParseSanitizer(testing::SyntheticReport(site, rng));
    ASSERT_EQ(findings.size(), 1u);
    if (store.Insert(findings[0], "t" + std::to_string(i), i) ==
        InsertResult::kNew) {
      ++fresh;
    }
  }
  EXPECT_EQ(fresh, 7);
  EXPECT_EQ(store.size(), 7u);
  EXPECT_EQ(store.TotalHits(), 100u);
  for (const auto& site : sites) {
    const CrashRecord* r = store.Find({site.path, site.line, ""});
    ASSERT_NE(r, nullptr) << site.path;
    EXPECT_EQ(r->kinds, std::vector<std::string>{site.kind});
  }
}

TEST(CrashStoreTest, SameLineDifferentKindIsOneSite) {
  CrashStore store;
  EXPECT_EQ(store.Insert(Finding("a.c", 1, "SEGV"), "x", 5), InsertResult::kNew);
  EXPECT_EQ(store.Insert(Finding("a.c", 1, "heap-use-after-free"), "y", 6),
            InsertResult::kDuplicate);
  EXPECT_EQ(store.Insert(Finding("a.c", 2, "SEGV"), "z", 6), InsertResult::kNew);
  const CrashRecord* r = store.Find({"a.c", 1, ""});
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->hits, 2u);
  EXPECT_EQ(r->exemplar, "x");
  EXPECT_EQ(r->kinds, (std::vector<std::string>{"SEGV", "heap-use-after-free"}));
}

TEST(CrashStoreTest, SnapshotOrder) {
  CrashStore store;
  store.Insert(Finding("b.c", 1, "k"), "", 20);
  store.Insert(Finding("a.c", 1, "k"), "", 10);
  store.Insert(Finding("c.c", 1, "k"), "", 10);
  const auto snap = store.Snapshot();
  ASSERT_EQ(snap.size(), 3u);
  EXPECT_EQ(snap[0].site.path, "a.c");
  EXPECT_EQ(snap[1].site.path, "c.c");
  EXPECT_EQ(snap[2].site.path, "b.c");
}

TEST(CrashStoreTest, JsonRoundTrip) {
  CrashStore store;
  store.Insert(Finding("ext/x.c", 9, "SEGV"), "/o/tests/1.phpt", 1, "1");
  store.Insert(Finding("ext/x.c", 9, "double-free"), "", 2);
  store.Insert(Finding("Zend/y.c", 3, "heap-buffer-overflow"), "/o/2", 3, "2");
  store.FindMutable({"Zend/y.c", 3, ""})->crashes_without_sanitizer = false;
  EXPECT_EQ(CrashStore::FromJson(store.ToJson()), store);
}

TEST_F(TriageTest, LogAppendCompactLoad) {
  const fs::path path = dir_ / "crashes.jsonl";
  CrashStore store;
  {
    CrashLog log(path, 3);
    for (int i = 0; i < 5; ++i) {
      store.Insert(Finding("f.c", i % 2, "SEGV"), "e", i);
      log.Append(*store.Find({"f.c", i % 2, ""}));
      if (log.NeedsCompaction()) log.Compact(store);
    }
  }
  EXPECT_EQ(CrashLog::Load(path), store);
  // A torn final line is ignored.
  std::ofstream(path, std::ios::app) << "{\"site\": {\"pa";
  EXPECT_EQ(CrashLog::Load(path), store);
  EXPECT_TRUE(CrashLog::Load(dir_ / "absent.jsonl").empty());
}

TEST_F(TriageTest, VerifyReproducesAndChecksPlainBuild) {
  const fs::path exemplar = dir_ / "t.phpt";
  std::ofstream(exemplar) << "--TEST--\nt\n--FILE--\n<?php\n$a = new Kind3();\n"
                             "sink3($a);\n";
  CrashStore store;
  store.Insert(Finding("Zend/mock_gamma.c", 303, "x"), exemplar.string(), 1, "t");
  CrashRecord record = *store.Find({"Zend/mock_gamma.c", 303, ""});
  TargetSpec target;
  target.command_template = std::string(MOCK_PHP) + " {file}";
  TargetSpec plain = target;
  plain.env_vars = {"MOCK_PHP_FIXED=1"};
  EXPECT_TRUE(Verify(record, target, &plain, dir_));
  EXPECT_TRUE(record.verified);
  ASSERT_TRUE(record.crashes_without_sanitizer.has_value());
  EXPECT_FALSE(*record.crashes_without_sanitizer);
  EXPECT_FALSE(Verify(record, plain, nullptr, dir_));
}

TEST_F(TriageTest, VerifyWithoutExemplarThrows) {
  CrashRecord record;
  record.exemplar = (dir_ / "gone.phpt").string();
  TargetSpec target;
  target.command_template = std::string(MOCK_PHP) + " {file}";
  try {
    Verify(record, target);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingExemplar);
  }
}

TEST(ReportTest, TableAndJson) {
  CrashStore store;
  EXPECT_NE(FormatReport(store).find("0 unique crash site(s), 0 hit(s)"),
            std::string::npos);
  store.Insert(Finding("ext/dom/php_dom.c", 311, "heap-use-after-free"), "e", 1);
  store.Insert(Finding("ext/dom/php_dom.c", 311, "heap-use-after-free"), "e", 2);
  const std::string text = FormatReport(store);
  EXPECT_NE(text.find("ext/dom/php_dom.c:311"), std::string::npos);
  EXPECT_NE(text.find("1 unique crash site(s), 2 hit(s)"), std::string::npos);
  const auto json = ReportJson(store);
  ASSERT_EQ(json.size(), 1u);
  EXPECT_EQ(json[0]["hits"], 2);
}

}  // namespace
}  // namespace fusefuzz
