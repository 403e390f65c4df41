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

#ifndef FUSEFUZZ_MUTATE_H_
#define FUSEFUZZ_MUTATE_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fusefuzz/phpparse.h"
#include "fusefuzz/rng.h"

namespace fusefuzz {

enum class MutationKind {
  kArithmetic,
  kAssignment,
  kLogical,
  kInteger,
  kString,
  kVariable,
};

std::string_view ToString(MutationKind kind);

inline constexpr double kDefaultMutationRate = 0.05;

// An operand or operator that may be replaced.
struct MutationSite {
  MutationKind kind;
  std::size_t statement = 0;
  ByteRange range;  // within the statement text
  std::string before;
  // Replacement candidates, none equal to `before`.
  std::vector<std::string> pool;
};

struct MutationEvent {
  MutationKind kind;
  std::size_t statement = 0;
  ByteRange range;  // within the original statement text
  std::string before;
  std::string after;
  ByteRange output;  // replacement text, padding included, in the new body

  bool operator==(const MutationEvent&) const = default;
};

struct MutationResult {
  Program program;
  std::vector<MutationEvent> events;
};

// Every eligible site of the program, in source order. Declaration
// statements and `declare`, `static` and `global` statements are never
// mutated.
std::vector<MutationSite> FindMutationSites(const Program& program);

// Replaces each eligible site independently with probability `rate`.
// The returned program is re-segmented from the mutated text.
MutationResult MutateProgram(const Program& program, double rate, Rng& rng);

}  // namespace fusefuzz

#endif  // FUSEFUZZ_MUTATE_H_
