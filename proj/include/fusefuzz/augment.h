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

#ifndef FUSEFUZZ_AUGMENT_H_
#define FUSEFUZZ_AUGMENT_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fusefuzz/corpus.h"
#include "fusefuzz/rng.h"

namespace fusefuzz {

// Bit-exact marker lines; the reducer never comments them out.
inline constexpr std::string_view kPrologueMarker = "// @fusefuzz:prologue";
inline constexpr std::string_view kEpilogueMarker = "// @fusefuzz:epilogue";

inline constexpr std::size_t kDefaultMaxCalls = 8;
inline constexpr std::size_t kDefaultInsertCount = 3;
inline constexpr double kDefaultInsertProbability = 0.2;

// Script fragments placed around a fused program. At target runtime the
// epilogue enumerates callable functions through reflection and calls up to
// `max_calls` of them with arguments drawn from get_defined_vars().
struct HarnessTemplate {
  std::string prologue;
  std::string epilogue;
  std::vector<std::string> exclusions;  // function-name prefixes
  std::size_t max_calls = kDefaultMaxCalls;
  uint64_t rng_seed = 0;
};

std::vector<std::string> DefaultExclusions();

// Renders prologue/epilogue text. `posix` is always excluded.
HarnessTemplate MakeHarnessTemplate(
    std::size_t max_calls, uint64_t rng_seed,
    std::vector<std::string> exclusions = DefaultExclusions());

bool HasHarness(std::string_view body);

// Inserts the prologue after the opening tag (after a leading `declare`)
// and the epilogue after the last statement. Throws kAlreadyInjected when
// the body already carries a harness.
std::string InjectInterfaceFuzzing(std::string_view body,
                                   const HarnessTemplate& harness);

struct EnvPlan {
  std::vector<std::string> merged_extensions;  // A then B, deduplicated
  std::vector<std::string> merged_ini;         // A lines then B lines
  std::vector<std::pair<std::string, std::string>> injected_ini;
  std::string merged_phpdbg;
  bool has_phpdbg = false;
  std::size_t insert_count = kDefaultInsertCount;
  double insert_prob = kDefaultInsertProbability;
};

// Merges environment sections and, with probability `q`, appends between 1
// and `k` options drawn from `dict`.
EnvPlan CrossoverEnv(const TestCase& a, const TestCase& b,
                     const IniDictionary& dict, std::size_t k, double q,
                     Rng& rng);

// Marker body for the expected-output section: the oracle is the
// sanitizer, so any output is accepted.
inline constexpr std::string_view kAcceptAnyOutput = "%A\n";

TestCase MergeSections(const TestCase& a, const TestCase& b,
                       std::string fused_body, const EnvPlan& env);

}  // namespace fusefuzz

#endif  // FUSEFUZZ_AUGMENT_H_
