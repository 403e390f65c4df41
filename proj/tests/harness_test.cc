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

#include "fusefuzz/harness.h"

#include <chrono>
#include <filesystem>

#include "gtest/gtest.h"

#include "fusefuzz/error.h"

namespace fusefuzz {
namespace {

namespace fs = std::filesystem;

TargetSpec Mock(const std::string& mode) {
  TargetSpec t;
  t.command_template = std::string(MOCK_PHP) + " --mode=" + mode +
                       " {ini_args} {file}";
  t.timeout_s = 5;
  return t;
}

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fusefuzz_harness_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TestCase Script(const std::string& body) {
  return TestCase(std::vector<Section>{{"TEST", "t\n"},
                                       {"INI", "memory_limit=-1\n"},
                                       {"FILE", body}});
}

TEST(SplitCommandTest, QuotesAndEscapes) {
  EXPECT_EQ(SplitCommand("php -n 'a b' \"c\\\"d\" e\\ f"),
            (std::vector<std::string>{"php", "-n", "a b", "c\"d", "e f"}));
  EXPECT_TRUE(SplitCommand("   ").empty());
}

TEST(RenderCommandTest, ExpandsPlaceholders) {
  TargetSpec t;
  t.command_template = "php {ini_args} -f {file} --phpt={phpt}";
  EXPECT_EQ(RenderCommand(t, "/x/a.php", "/x/a.phpt", {"-d", "k=v"}),
            (std::vector<std::string>{"php", "-d", "k=v", "-f", "/x/a.php",
                                      "--phpt=/x/a.phpt"}));
}

TEST(IniArgsTest, OneFlagPerEntry) {
  const TestCase t(std::vector<Section>{
      {"TEST", "t\n"}, {"INI", "a=1\n\nb = two words\n"}, {"FILE", ""}});
  EXPECT_EQ(IniArgs(t),
            (std::vector<std::string>{"-d", "a=1", "-d", "b=two words"}));
}

TEST(TargetSpecTest, Validate) {
  TargetSpec t;
  EXPECT_THROW(t.Validate(), Error);
  t.command_template = "php {file}";
  EXPECT_NO_THROW(t.Validate());
  t.timeout_s = 0;
  EXPECT_THROW(t.Validate(), Error);
}

TEST_F(HarnessTest, MockCrashYieldsFinding) {
  const ExecutionOutcome out = RunTest(
      Script("<?php\n$a = new Kind1();\nsink1($a);\n"), Mock("interp"),
      dir_ / "crash");
  EXPECT_EQ(out.status, ExitStatus::kCrash);
  ASSERT_EQ(out.findings.size(), 1u);
  EXPECT_EQ(out.findings[0].kind, "heap-use-after-free");
  EXPECT_EQ(out.findings[0].site.Key(), "ext/mock/alpha.c:101");
  EXPECT_TRUE(fs::exists(dir_ / "crash.phpt"));
  EXPECT_TRUE(fs::exists(dir_ / "crash.php"));
}

TEST_F(HarnessTest, NoopIsClean) {
  const ExecutionOutcome out =
      RunTest(Script("<?php\n"), Mock("noop"), dir_ / "noop");
  EXPECT_EQ(out.status, ExitStatus::kClean);
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_TRUE(out.findings.empty());
}

TEST_F(HarnessTest, SignalIsCrash) {
  const ExecutionOutcome out =
      RunTest(Script("<?php\n"), Mock("segv"), dir_ / "segv");
  EXPECT_EQ(out.status, ExitStatus::kCrash);
  EXPECT_EQ(out.signal, SIGSEGV);
  EXPECT_EQ(out.exit_code, -1);
}

TEST_F(HarnessTest, TimeoutKillsQuickly) {
  TargetSpec t = Mock("sleep");
  t.timeout_s = 1;
  const auto start = std::chrono::steady_clock::now();
  const ExecutionOutcome out = RunTest(Script("<?php\n"), t, dir_ / "sleep");
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  EXPECT_TRUE(out.timed_out);
  EXPECT_EQ(out.status, ExitStatus::kTimeout);
  EXPECT_LT(wall, 1.5);
}

TEST_F(HarnessTest, StreamsAreCapped) {
  TargetSpec t = Mock("flood");
  t.stream_cap = 64 * 1024;
  const ExecutionOutcome out = RunTest(Script("<?php\n"), t, dir_ / "flood");
  EXPECT_EQ(out.stdout_text.size(), t.stream_cap);
  EXPECT_EQ(out.stderr_text.size(), t.stream_cap);
  EXPECT_TRUE(out.stdout_truncated);
  EXPECT_TRUE(out.stderr_truncated);
  EXPECT_EQ(out.status, ExitStatus::kClean);
}

TEST_F(HarnessTest, EnvironmentIsPassed) {
  TargetSpec t = Mock("interp");
  t.env_vars = {"MOCK_PHP_FIXED=1"};
  const ExecutionOutcome out = RunTest(
      Script("<?php\n$a = new Kind2();\nsink2($a);\n"), t, dir_ / "fixed");
  EXPECT_EQ(out.status, ExitStatus::kClean);
}

TEST_F(HarnessTest, MissingBinaryIsSpawnFailure) {
  TargetSpec t;
  t.command_template = "/nonexistent/php-binary {file}";
  try {
    RunTest(Script("<?php\n"), t, dir_ / "missing");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSpawnFailure);
  }
}

}  // namespace
}  // namespace fusefuzz
