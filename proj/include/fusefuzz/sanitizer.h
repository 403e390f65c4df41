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

#ifndef FUSEFUZZ_SANITIZER_H_
#define FUSEFUZZ_SANITIZER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fusefuzz {

// Dedup key is (path, line); `kind` rides along.
struct CrashSite {
  std::string path;
  int64_t line = 0;
  std::string kind;

  bool SameSite(const CrashSite& other) const {
    return path == other.path && line == other.line;
  }
  std::string Key() const { return path + ":" + std::to_string(line); }
  bool operator==(const CrashSite&) const = default;
};

struct SanitizerFinding {
  std::string kind;
  CrashSite site;
  std::string raw_excerpt;
  uint64_t stack_hash = 0;
  std::string tool;  // AddressSanitizer, LeakSanitizer, UndefinedBehaviorSanitizer
};

// Drops the build prefix so that sites from differently rooted builds
// compare equal: "/php-src/ext/dom/php_dom.c" -> "ext/dom/php_dom.c".
std::string NormalizeSourcePath(std::string_view path);

// One finding per report block. Unrecognized text yields no findings.
std::vector<SanitizerFinding> ParseSanitizer(std::string_view log);

}  // namespace fusefuzz

#endif  // FUSEFUZZ_SANITIZER_H_
