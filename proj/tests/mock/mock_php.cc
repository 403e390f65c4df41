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

// Stand-in interpreter for tests. It understands just enough of the fused
// scripts to exhibit seeded bugs and prints sanitizer-style reports.
//
//   mock_php --mode=interp  [-d k=v]... FILE   tracks `$x = new KindN` and
//                                              `$x = $y`; `sinkN($x)` crashes
//                                              when $x holds a KindN
//   mock_php --mode=markers FILE               crashes iff uncommented lines
//                                              contain MARKER_X and MARKER_Y
//   mock_php --mode=noop | sleep | flood | segv
//
// MOCK_PHP_FIXED=1 disables every crash.

#include <unistd.h>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <thread>

namespace {

struct Bug {
  const char* kind;
  const char* file;
  int line;
  const char* function;
  bool ubsan;
};

const Bug kBugs[] = {
    {"heap-use-after-free", "ext/mock/alpha.c", 101, "alpha_sink", false},
    {"heap-buffer-overflow", "ext/mock/beta.c", 202, "beta_sink", false},
    {"applying zero offset to null pointer", "Zend/mock_gamma.c", 303,
     "gamma_sink", true},
};

const Bug kMarkerBug = {"heap-use-after-free", "ext/mock/markers.c", 42,
                        "marker_pair", false};

[[noreturn]] void Crash(const Bug& bug) {
  std::fflush(stdout);
  const int pid = static_cast<int>(getpid());
  if (bug.ubsan) {
    std::fprintf(stderr,
                 "/php-src/%s:%d:7: runtime error: %s\n"
                 "    #0 0x55d0c0de1000 in %s /php-src/%s:%d:7\n"
                 "    #1 0x55d0c0de2000 in execute_ex /php-src/Zend/zend_vm_execute.h:57000:5\n"
                 "SUMMARY: UndefinedBehaviorSanitizer: undefined-behavior "
                 "/php-src/%s:%d:7 in\n",
                 bug.file, bug.line, bug.kind, bug.function, bug.file,
                 bug.line, bug.file, bug.line);
  } else {
    std::fprintf(stderr,
                 "=================================================================\n"
                 "==%d==ERROR: AddressSanitizer: %s on address 0x602000000010 "
                 "at pc 0x55d0c0de1000 bp 0x7ffc00000000 sp 0x7ffc00000008\n"
                 "READ of size 8 at 0x602000000010 thread T0\n"
                 "    #0 0x55d0c0de1000 in %s /php-src/%s:%d:5\n"
                 "    #1 0x55d0c0de2000 in execute_ex /php-src/Zend/zend_vm_execute.h:57000:5\n"
                 "    #2 0x7f0000029d8f  (/lib/x86_64-linux-gnu/libc.so.6+0x29d8f)\n"
                 "SUMMARY: AddressSanitizer: %s /php-src/%s:%d:5 in %s\n"
                 "==%d==ABORTING\n",
                 pid, bug.kind, bug.function, bug.file, bug.line, bug.kind,
                 bug.file, bug.line, bug.function, pid);
  }
  std::fflush(stderr);
  std::_Exit(1);
}

bool IsCommented(const std::string& line) {
  const std::size_t first = line.find_first_not_of(" \t");
  return first != std::string::npos && line.compare(first, 2, "//") == 0;
}

int Interp(const std::string& source, bool fixed) {
  static const std::regex kNew(R"(^\s*\$(\w+)\s*=\s*new\s+Kind(\d+)\b)");
  static const std::regex kCopy(R"(^\s*\$(\w+)\s*=\s*\$(\w+)\s*$)");
  static const std::regex kAssign(R"(^\s*\$(\w+)\s*=[^=])");
  static const std::regex kSink(R"(\bsink(\d+)\s*\(\s*\$(\w+)\s*\))");
  std::map<std::string, int> kinds;
  std::istringstream lines(source);
  std::string line;
  while (std::getline(lines, line)) {
    if (IsCommented(line)) continue;
    std::istringstream stmts(line);
    std::string stmt;
    while (std::getline(stmts, stmt, ';')) {
      std::smatch m;
      if (std::regex_search(stmt, m, kNew)) {
        kinds[m[1]] = std::stoi(m[2]);
      } else if (std::regex_search(stmt, m, kCopy)) {
        kinds[m[1]] = kinds.count(m[2]) ? kinds[m[2]] : 0;
      } else if (std::regex_search(stmt, m, kAssign)) {
        kinds[m[1]] = 0;
      }
      if (std::regex_search(stmt, m, kSink)) {
        const int n = std::stoi(m[1]);
        auto it = kinds.find(m[2]);
        if (!fixed && it != kinds.end() && it->second == n && n >= 1 &&
            n <= 3) {
          Crash(kBugs[n - 1]);
        }
      }
    }
  }
  std::printf("ok\n");
  return 0;
}

int Markers(const std::string& source, bool fixed) {
  bool x = false, y = false;
  std::istringstream lines(source);
  std::string line;
  while (std::getline(lines, line)) {
    if (IsCommented(line)) continue;
    x = x || line.find("MARKER_X") != std::string::npos;
    y = y || line.find("MARKER_Y") != std::string::npos;
  }
  if (x && y && !fixed) Crash(kMarkerBug);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::string mode = "interp";
  std::string file;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--mode=", 0) == 0) {
      mode = arg.substr(7);
    } else if (arg == "-d" && i + 1 < argc) {
      ++i;  // INI settings are accepted and ignored
    } else {
      file = arg;
    }
  }
  const char* fixed_env = std::getenv("MOCK_PHP_FIXED");
  const bool fixed = fixed_env && std::string(fixed_env) == "1";

  if (mode == "noop") return 0;
  if (mode == "sleep") {
    std::this_thread::sleep_for(std::chrono::seconds(30));
    return 0;
  }
  if (mode == "flood") {
    const std::string chunk(1 << 16, 'x');
    for (int i = 0; i < 48; ++i) {
      std::fwrite(chunk.data(), 1, chunk.size(), stdout);
      std::fwrite(chunk.data(), 1, chunk.size(), stderr);
    }
    return 0;
  }
  if (mode == "segv") {
    if (!fixed) std::raise(SIGSEGV);
    return 0;
  }

  std::ifstream in(file, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "Could not open input file: %s\n", file.c_str());
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  if (mode == "markers") return Markers(buf.str(), fixed);
  return Interp(buf.str(), fixed);
}
