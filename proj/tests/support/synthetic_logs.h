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

#ifndef FUSEFUZZ_TESTS_SUPPORT_SYNTHETIC_LOGS_H_
#define FUSEFUZZ_TESTS_SUPPORT_SYNTHETIC_LOGS_H_

#include <cstdio>
#include <string>
#include <vector>

#include "fusefuzz/rng.h"

namespace fusefuzz::testing {

struct SyntheticSite {
  std::string path;  // normalized
  int line;
  std::string kind;
};

inline const std::vector<SyntheticSite>& SevenSites() {
  static const std::vector<SyntheticSite> sites = {
      {"ext/dom/php_dom.c", 311, "heap-use-after-free"},
      {"ext/standard/base64.c", 77, "heap-buffer-overflow"},
      {"ext/ffi/ffi.c", 1162, "SEGV"},
      {"Zend/zend_generators.c", 212, "heap-use-after-free"},
      {"Zend/zend_execute.c", 3300, "stack-overflow"},
      {"main/streams/streams.c", 1510, "double-free"},
      {"ext/spl/spl_fixedarray.c", 88, "heap-buffer-overflow"},
  };
  return sites;
}

// An ASan report for `site`, with a random build prefix, pid, extra frames
// and surrounding interpreter noise.
inline std::string SyntheticReport(const SyntheticSite& site, Rng& rng) {
  static const char* kPrefixes[] = {"/php-src/", "/home/ci/build/php-8.4/",
                                    "/tmp/x/php-src-master/"};
  const std::string prefix = kPrefixes[rng.Uniform(3)];
  const unsigned pid = 1000 + static_cast<unsigned>(rng.Uniform(60000));
  char buf[2048];
  std::string log = "Warning: noise on line " + std::to_string(rng.Uniform(9)) + "\n";
  std::snprintf(buf, sizeof(buf),
                "==%u==ERROR: AddressSanitizer: %s on address 0x%llx at pc "
                "0x1 bp 0x2 sp 0x3\n",
                pid, site.kind.c_str(),
                static_cast<unsigned long long>(rng.Next() >> 16));
  log += buf;
  std::snprintf(buf, sizeof(buf), "    #0 0x10 in f0 %s%s:%d:%llu\n",
                prefix.c_str(), site.path.c_str(), site.line,
                static_cast<unsigned long long>(1 + rng.Uniform(30)));
  log += buf;
  const std::size_t extra = rng.Uniform(4);
  for (std::size_t i = 0; i < extra; ++i) {
    std::snprintf(buf, sizeof(buf), "    #%zu 0x%zx in g%zu %sZend/zend_vm_execute.h:%llu:3\n",
                  i + 1, 0x20 + i, i, prefix.c_str(),
                  static_cast<unsigned long long>(1000 + rng.Uniform(50000)));
    log += buf;
  }
  std::snprintf(buf, sizeof(buf), "SUMMARY: AddressSanitizer: %s %s%s:%d:5 in f0\n",
                site.kind.c_str(), prefix.c_str(), site.path.c_str(),
                site.line);
  log += buf;
  std::snprintf(buf, sizeof(buf), "==%u==ABORTING\n", pid);
  log += buf;
  return log;
}

}  // namespace fusefuzz::testing

#endif  // FUSEFUZZ_TESTS_SUPPORT_SYNTHETIC_LOGS_H_
