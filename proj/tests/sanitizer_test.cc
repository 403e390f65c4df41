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

#include "fusefuzz/sanitizer.h"

#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

namespace fusefuzz {
namespace {

std::string Log(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/logs/" + name);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TEST(NormalizeSourcePathTest, StripsBuildPrefix) {
  EXPECT_EQ(NormalizeSourcePath("/php-src/ext/dom/php_dom.c"),
            "ext/dom/php_dom.c");
  EXPECT_EQ(NormalizeSourcePath("/home/u/build/php-8.3/Zend/zend.c"),
            "Zend/zend.c");
  EXPECT_EQ(NormalizeSourcePath("main/main.c"), "main/main.c");
  EXPECT_EQ(NormalizeSourcePath("/usr/src/other.c"), "/usr/src/other.c");
}

TEST(ParseSanitizerTest, DomUseAfterFreeAbort) {
  const auto findings = ParseSanitizer(Log("dom_uaf.log"));
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].kind, "heap-use-after-free");
  EXPECT_EQ(findings[0].site.path, "ext/dom/php_dom.c");
  EXPECT_EQ(findings[0].site.line, 311);
  EXPECT_EQ(findings[0].tool, "AddressSanitizer");
  EXPECT_NE(findings[0].raw_excerpt.find("SUMMARY"), std::string::npos);
}

TEST(ParseSanitizerTest, BareSummaryLine) {
  const auto findings = ParseSanitizer(
      "AddressSanitizer: heap-use-after-free /php-src/ext/dom/php_dom.c:311\n"
      "SUMMARY: AddressSanitizer: heap-use-after-free "
      "/php-src/ext/dom/php_dom.c:311 in f\n");
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].site.Key(), "ext/dom/php_dom.c:311");
}

TEST(ParseSanitizerTest, TwoSummariesTwoFindings) {
  const auto findings = ParseSanitizer(Log("two_reports.log"));
  ASSERT_EQ(findings.size(), 2u);
  EXPECT_EQ(findings[0].site.Key(), "ext/standard/base64.c:77");
  EXPECT_EQ(findings[0].kind, "heap-buffer-overflow");
  EXPECT_EQ(findings[1].site.Key(), "ext/ffi/ffi.c:1162");
  EXPECT_EQ(findings[1].kind, "SEGV");
  EXPECT_NE(findings[0].stack_hash, findings[1].stack_hash);
}

TEST(ParseSanitizerTest, UbsanWithoutSummary) {
  const auto findings = ParseSanitizer(Log("ubsan.log"));
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].site.Key(), "Zend/zend_operators.c:2211");
  EXPECT_EQ(findings[0].kind, "signed integer overflow");
  EXPECT_EQ(findings[0].tool, "UndefinedBehaviorSanitizer");
}

TEST(ParseSanitizerTest, FallsBackToFirstProjectFrame) {
  const auto findings = ParseSanitizer(Log("nosummary.log"));
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].kind, "stack-overflow");
  EXPECT_EQ(findings[0].site.Key(), "Zend/zend_execute_API.c:889");
}

TEST(ParseSanitizerTest, NoiseYieldsNothing) {
  EXPECT_TRUE(ParseSanitizer("").empty());
  EXPECT_TRUE(ParseSanitizer("Fatal error: Uncaught Error in /t.php:3\n").empty());
  EXPECT_TRUE(ParseSanitizer("SUMMARY: nothing here\n#0 junk\n").empty());
}

TEST(ParseSanitizerTest, StackHashIsStable) {
  EXPECT_EQ(ParseSanitizer(Log("dom_uaf.log"))[0].stack_hash,
            ParseSanitizer(Log("dom_uaf.log"))[0].stack_hash);
}

}  // namespace
}  // namespace fusefuzz
