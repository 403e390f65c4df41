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

#ifndef FUSEFUZZ_HARNESS_H_
#define FUSEFUZZ_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fusefuzz/corpus.h"
#include "fusefuzz/sanitizer.h"

namespace fusefuzz {

inline constexpr double kDefaultTimeoutSeconds = 10.0;
inline constexpr std::size_t kDefaultStreamCap = 1 << 20;

// How the target is invoked. Placeholders in `command_template`:
//   {file}      script holding the FILE body
//   {phpt}      the whole serialized test (for runner-style backends)
//   {ini_args}  `-d key=value` for every INI line
// The template is split into words shell-style but run without a shell.
struct TargetSpec {
  std::string command_template;
  std::filesystem::path working_dir;
  double timeout_s = kDefaultTimeoutSeconds;
  std::vector<std::string> env_vars;  // key=value
  std::size_t stream_cap = kDefaultStreamCap;

  // Throws kInvalidArgument.
  void Validate() const;
};

enum class ExitStatus { kClean, kCrash, kTimeout };

std::string_view ToString(ExitStatus status);

struct ExecutionOutcome {
  ExitStatus status = ExitStatus::kClean;
  int exit_code = -1;  // -1 when terminated by a signal
  int signal = 0;
  bool timed_out = false;
  std::string stdout_text;
  std::string stderr_text;
  bool stdout_truncated = false;
  bool stderr_truncated = false;
  int64_t duration_ms = 0;
  std::vector<SanitizerFinding> findings;
};

// Shell-like word splitting: whitespace separates, quotes group, backslash
// escapes.
std::vector<std::string> SplitCommand(std::string_view command);

std::vector<std::string> IniArgs(const TestCase& test);

std::vector<std::string> RenderCommand(const TargetSpec& target,
                                       const std::string& file,
                                       const std::string& phpt,
                                       const std::vector<std::string>& ini_args);

// Runs argv[0] (PATH lookup) with captured streams. Throws kSpawnFailure.
ExecutionOutcome Execute(const std::vector<std::string>& argv,
                         const TargetSpec& target);

// Writes `<stem>.phpt` and `<stem>.php`, then executes the target on them.
ExecutionOutcome RunTest(const TestCase& test, const TargetSpec& target,
                         const std::filesystem::path& stem);

}  // namespace fusefuzz

#endif  // FUSEFUZZ_HARNESS_H_
