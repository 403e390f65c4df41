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

#ifndef FUSEFUZZ_CAMPAIGN_H_
#define FUSEFUZZ_CAMPAIGN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "fusefuzz/corpus.h"
#include "fusefuzz/fusion.h"
#include "fusefuzz/harness.h"
#include "fusefuzz/triage.h"

namespace fusefuzz {

struct CampaignConfig {
  std::size_t jobs = 1;
  std::optional<double> duration_s;        // unset: no time limit
  std::optional<uint64_t> max_iterations;  // total over all workers
  uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  FuseConfig fuse;
  TargetSpec target;
  std::optional<TargetSpec> plain_target;  // build without sanitizers
  bool keep_all_tests = false;             // store clean tests too
  bool verify_new_sites = true;
};

struct CampaignReport {
  uint64_t executions = 0;
  uint64_t crashes = 0;
  uint64_t timeouts = 0;
  uint64_t generation_errors = 0;
  std::vector<uint64_t> per_worker;  // executions per worker
  std::vector<CrashRecord> records;
  double elapsed_s = 0;
  std::string failure;  // set when the campaign stopped on an infrastructure error
};

// The test for one (campaign seed, worker, iteration) triple. Pure function
// of its arguments. Throws kCorpusTooSmall for fusion and concat modes on a
// corpus of fewer than two tests.
FusedTest GenerateTest(std::span<const TestCase> corpus, const FuseConfig& config,
                       uint64_t campaign_seed, uint64_t worker,
                       uint64_t iteration);

// Runs `config.jobs` workers until the duration elapses, the iteration
// budget is used up or RequestStop() is called. Writes campaign.jsonl,
// crashes.jsonl, tests/ and logs/ under `config.out_dir`.
// Throws kEmptyCorpus and kOutDirUnwritable.
CampaignReport RunCampaign(std::span<const TestCase> corpus,
                           const CampaignConfig& config);

// Async-signal-safe.
void RequestStop();

nlohmann::json ToJson(const Provenance& provenance);
nlohmann::json ToJson(const CampaignConfig& config);
nlohmann::json ToJson(const ExecutionOutcome& outcome);

}  // namespace fusefuzz

#endif  // FUSEFUZZ_CAMPAIGN_H_
