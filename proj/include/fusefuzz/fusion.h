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

#ifndef FUSEFUZZ_FUSION_H_
#define FUSEFUZZ_FUSION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fusefuzz/augment.h"
#include "fusefuzz/corpus.h"
#include "fusefuzz/dataflow.h"
#include "fusefuzz/mutate.h"
#include "fusefuzz/phpparse.h"
#include "fusefuzz/rng.h"

namespace fusefuzz {

enum class FuseMode {
  kFusion,       // dataflow fusion of two seeds
  kConcat,       // concatenation without variable replacement
  kSuiteReplay,  // one seed, verbatim
};

std::string_view ToString(FuseMode mode);
std::optional<FuseMode> ParseFuseMode(std::string_view text);

inline constexpr double kDefaultReplaceProbability = 0.5;
inline constexpr std::string_view kDefaultSharedName = "fusion";

// Per-seed half of a fusion plan.
struct FusionSide {
  bool active = false;  // false when the side takes part only by concatenation
  std::size_t chain = 0;
  std::vector<std::string> chain_variables;
  std::string variable;
  std::vector<Site> sites;  // occurrences rewritten to the shared name
  bool forced = false;      // no site passed the coin flip; one was forced
};

struct FusionPlan {
  std::string shared_name;
  double p = kDefaultReplaceProbability;
  FusionSide a;
  FusionSide b;
};

// Picks a chain (weighted), a variable in it (uniform) and the occurrences
// to replace (each with probability `p`, at least one).
FusionSide PlanSide(std::span<const DataflowChain> chains, double p, Rng& rng);

// Smallest `base`, `base1`, `base2`, ... that is not a variable name in any
// of `texts`.
std::string FreshVariableName(std::string_view base,
                              std::span<const std::string_view> texts);

// Throws kNoChains when either side has no chain.
FusionPlan PlanFusion(const Program& a, std::span<const DataflowChain> chains_a,
                      const Program& b, std::span<const DataflowChain> chains_b,
                      double p, std::string_view shared_base, Rng& rng);

// Rewrites the planned sites and concatenates A' and B' into one script.
// Inactive sides are copied unchanged. Throws kOverlappingSites when the
// sites of one side overlap or do not name the planned variable.
std::string ApplyFusion(const Program& a, const Program& b,
                        const FusionPlan& plan);

struct Rename {
  std::string from;
  std::string to;
};

// Renames B's top-level function/class/interface/trait/enum/const
// declarations that collide with A's and neutralizes B's `declare`
// statements, which may only appear first in a script.
Program PrepareSecond(const Program& a, const Program& b,
                      std::vector<Rename>* renames);

struct FuseConfig {
  FuseMode mode = FuseMode::kFusion;
  double p = kDefaultReplaceProbability;
  double mutation_rate = kDefaultMutationRate;
  std::string shared_name = std::string(kDefaultSharedName);
  bool interface_fuzzing = true;
  std::size_t max_calls = kDefaultMaxCalls;
  std::size_t k = kDefaultInsertCount;
  double q = kDefaultInsertProbability;
  const IniDictionary* dictionary = nullptr;
};

struct Provenance {
  std::string seed_a;  // test ids
  std::string seed_b;
  std::string seed_a_path;
  std::string seed_b_path;
  uint64_t rng_seed = 0;
  FuseMode mode = FuseMode::kFusion;
  std::vector<MutationEvent> mutations_a;
  std::vector<MutationEvent> mutations_b;
  FusionPlan plan;
  bool fallback = false;
  std::string fallback_reason;
  std::vector<Rename> renames;
  uint64_t harness_seed = 0;
  std::vector<std::pair<std::string, std::string>> injected_ini;

  // Comment block embedded in the fused script.
  std::string ToHeader() const;
};

inline constexpr std::string_view kProvenanceMarker = "/* @fusefuzz:provenance";

// Removes the provenance comment inserted by Fuse, restoring the script
// layout around it.
std::string StripProvenanceHeader(std::string_view body);

struct FusedTest {
  TestCase test;
  Provenance provenance;
};

// Mutates both seeds, fuses them per `config.mode`, injects the harness
// and crosses over environment sections. Deterministic in `seed`.
FusedTest Fuse(const TestCase& a, const TestCase& b, const FuseConfig& config,
               uint64_t seed);

}  // namespace fusefuzz

#endif  // FUSEFUZZ_FUSION_H_
