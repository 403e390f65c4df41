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

#ifndef FUSEFUZZ_DATAFLOW_H_
#define FUSEFUZZ_DATAFLOW_H_

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fusefuzz/phpparse.h"
#include "fusefuzz/rng.h"

namespace fusefuzz {

// A definition of `var` generated at statement `site`.
struct Definition {
  std::string var;
  std::size_t site = 0;

  auto operator<=>(const Definition&) const = default;
};

using DefinitionSet = std::set<Definition>;

// Per-statement reaching-definition facts for a straight-line program:
//   IN(0) = {}                 IN(i) = OUT(i-1)
//   OUT(i) = GEN(i) u (IN(i) \ KILL(i)) u FUN(i)
struct FlowSets {
  std::vector<DefinitionSet> in;
  std::vector<DefinitionSet> out;
  std::vector<DefinitionSet> gen;
  std::vector<DefinitionSet> kill;
  std::vector<DefinitionSet> fun;

  std::size_t size() const { return in.size(); }
};

// Occurrence site of a variable within a program.
struct Site {
  std::size_t statement = 0;
  ByteRange range;
  Role role = Role::kUse;

  auto operator<=>(const Site&) const = default;
};

// Connected group of variables linked by def-use propagation.
struct DataflowChain {
  // Ordered by first occurrence in the program.
  std::vector<std::string> variables;
  std::size_t weight = 0;
  std::map<std::string, std::vector<Site>> sites;
};

// Throws kEmptyProgram when `program` has no statements.
FlowSets ComputeFlowSets(const Program& program);

// Connected components of the def-use graph over top-level, non-reserved
// variables. Components are ordered by their first occurrence.
std::vector<DataflowChain> FindChains(const FlowSets& flow,
                                      const Program& program);

// Index of a chain drawn with probability weight / sum(weights).
// Throws kNoChains on an empty list.
std::size_t SelectChain(std::span<const DataflowChain> chains, Rng& rng);

// `[$a]→[$b]→[$c] (w=3)`.
std::string FormatChain(const DataflowChain& chain);

}  // namespace fusefuzz

#endif  // FUSEFUZZ_DATAFLOW_H_
