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

#ifndef FUSEFUZZ_REDUCE_H_
#define FUSEFUZZ_REDUCE_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include "fusefuzz/corpus.h"
#include "fusefuzz/harness.h"
#include "fusefuzz/sanitizer.h"

namespace fusefuzz {

inline constexpr std::size_t kDefaultReduceBudget = 2000;
inline constexpr std::string_view kLineComment = "//";

struct ReductionResult {
  std::size_t original_lines = 0;
  std::size_t reduced_lines = 0;  // FILE lines left uncommented
  TestCase reduced_test;
  std::size_t iterations = 0;      // granularity passes over the FILE lines
  std::size_t predicate_runs = 0;  // distinct candidates executed
  bool budget_exhausted = false;
};

// True when the candidate still exhibits the failure being reduced.
using CrashPredicate = std::function<bool(const TestCase&)>;

// Lines the reducer never comments out: open/close tags and harness
// markers.
bool IsProtectedLine(std::string_view line);

// ddmin over FILE lines (commenting out during the search), then single
// INI/EXTENSIONS entries and optional sections, then physical deletion of
// the commented lines. Throws kNotReproducible when `test` itself fails the
// predicate.
ReductionResult Reduce(const TestCase& test, const CrashPredicate& crashes,
                       std::size_t budget = kDefaultReduceBudget);

// Same-site predicate against a real target.
ReductionResult Reduce(const TestCase& test, const TargetSpec& target,
                       const CrashSite& site,
                       std::size_t budget = kDefaultReduceBudget,
                       const std::filesystem::path& scratch = {});

}  // namespace fusefuzz

#endif  // FUSEFUZZ_REDUCE_H_
