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

#include "fusefuzz/campaign.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gtest/gtest.h"
#include "json.hpp"

#include "fusefuzz/error.h"

namespace fusefuzz {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CampaignTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fusefuzz_campaign_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    corpus_ = LoadCorpus(FIXTURE_DIR "/mockbugs").tests;
  }
  void TearDown() override { fs::remove_all(dir_); }

  CampaignConfig Config(const std::string& mode = "interp") const {
    CampaignConfig c;
    c.out_dir = dir_;
    c.seed = 2024;
    c.target.command_template =
        std::string(MOCK_PHP) + " --mode=" + mode + " {ini_args} {file}";
    return c;
  }

  std::vector<json> Records(const std::string& type) const {
    std::vector<json> out;
    std::ifstream in(dir_ / "campaign.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      json j = json::parse(line);
      if (j["type"] == type) out.push_back(std::move(j));
    }
    return out;
  }

  fs::path dir_;
  std::vector<TestCase> corpus_;
};

TEST_F(CampaignTest, GenerateTestIsPure) {
  const FuseConfig config;
  for (uint64_t i = 0; i < 20; ++i) {
    EXPECT_EQ(SerializePhpt(GenerateTest(corpus_, config, 7, i % 3, i).test),
              SerializePhpt(GenerateTest(corpus_, config, 7, i % 3, i).test));
  }
  EXPECT_NE(SerializePhpt(GenerateTest(corpus_, config, 7, 0, 0).test),
            SerializePhpt(GenerateTest(corpus_, config, 7, 1, 0).test));
  EXPECT_THROW(GenerateTest({}, config, 7, 0, 0), Error);
}

TEST_F(CampaignTest, ZeroDurationIsEmpty) {
  CampaignConfig c = Config();
  c.jobs = 2;
  c.duration_s = 0;
  const CampaignReport r = RunCampaign(corpus_, c);
  EXPECT_EQ(r.executions, 0u);
  EXPECT_TRUE(r.records.empty());
  EXPECT_TRUE(r.failure.empty());
  EXPECT_EQ(Records("summary").size(), 1u);
}

TEST_F(CampaignTest, TwoWorkersReplayByteIdentical) {
  CampaignConfig c = Config("noop");
  c.jobs = 2;
  c.duration_s = 2;
  c.keep_all_tests = true;
  const CampaignReport r = RunCampaign(corpus_, c);
  ASSERT_EQ(r.per_worker.size(), 2u);
  EXPECT_GE(r.per_worker[0], 1u);
  EXPECT_GE(r.per_worker[1], 1u);
  const auto execs = Records("exec");
  EXPECT_EQ(execs.size(), r.executions);
  for (std::size_t i = 0; i < execs.size(); i += 1 + execs.size() / 50) {
    const json& e = execs[i];
    const FusedTest again = GenerateTest(corpus_, c.fuse, c.seed,
                                         e["worker"].get<uint64_t>(),
                                         e["iteration"].get<uint64_t>());
    std::ifstream in(dir_ / "tests" / (e["test_id"].get<std::string>() + ".phpt"),
                     std::ios::binary);
    std::stringstream stored;
    stored << in.rdbuf();
    EXPECT_EQ(stored.str(), SerializePhpt(again.test));
  }
}

TEST_F(CampaignTest, IterationBudgetIsExact) {
  CampaignConfig c = Config("noop");
  c.jobs = 3;
  c.max_iterations = 25;
  const CampaignReport r = RunCampaign(corpus_, c);
  EXPECT_EQ(r.executions, 25u);
  EXPECT_EQ(Records("exec").size(), 25u);
}

TEST_F(CampaignTest, FindsAllThreeSeededBugs) {
  CampaignConfig c = Config();
  c.jobs = 4;
  c.max_iterations = 4000;
  TargetSpec plain = c.target;
  plain.env_vars = {"MOCK_PHP_FIXED=1"};
  c.plain_target = plain;
  const CampaignReport r = RunCampaign(corpus_, c);
  std::set<std::string> sites;
  for (const CrashRecord& rec : r.records) {
    sites.insert(rec.site.Key());
    EXPECT_TRUE(rec.verified) << rec.site.Key();
    EXPECT_EQ(rec.crashes_without_sanitizer, false);
    EXPECT_TRUE(fs::exists(rec.exemplar));
  }
  EXPECT_EQ(sites, (std::set<std::string>{"ext/mock/alpha.c:101",
                                          "ext/mock/beta.c:202",
                                          "Zend/mock_gamma.c:303"}));
  EXPECT_EQ(CrashLog::Load(dir_ / "crashes.jsonl").size(), 3u);
}

TEST_F(CampaignTest, SpawnFailureStops) {
  CampaignConfig c = Config();
  c.target.command_template = "/nonexistent/php {file}";
  c.max_iterations = 10;
  const CampaignReport r = RunCampaign(corpus_, c);
  EXPECT_FALSE(r.failure.empty());
  EXPECT_EQ(r.executions, 0u);
}

TEST_F(CampaignTest, EmptyCorpusAndBadOutDir) {
  EXPECT_THROW(RunCampaign({}, Config()), Error);
  fs::create_directories(dir_);
  std::ofstream(dir_ / "file") << "x";
  CampaignConfig c = Config();
  c.out_dir = dir_ / "file" / "sub";
  try {
    RunCampaign(corpus_, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutDirUnwritable);
  }
}

}  // namespace
}  // namespace fusefuzz
