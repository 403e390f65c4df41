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

#include "fusefuzz/sanitizer.h"

#include <cctype>
#include <optional>
#include <regex>

#include "fusefuzz/corpus.h"
#include "fusefuzz/rng.h"

namespace fusefuzz {

namespace {

constexpr std::size_t kExcerptCap = 4096;
constexpr std::size_t kHashFrames = 5;

struct Frame {
  std::string function;
  std::string path;
  int64_t line = 0;
};

struct Block {
  std::string tool;
  std::string kind;
  std::optional<CrashSite> own_site;
  std::optional<CrashSite> summary_site;
  std::vector<Frame> frames;
  std::string excerpt;
};

// Splits "path:line[:col]" into its parts.
std::optional<CrashSite> ParseLocation(std::string_view token) {
  static const std::regex kLoc(R"(^(.*[^:\d][^:]*):(\d+)(?::\d+)?$)");
  std::cmatch m;
  if (!std::regex_match(token.begin(), token.end(), m, kLoc)) {
    return std::nullopt;
  }
  CrashSite site;
  site.path = NormalizeSourcePath(m[1].str());
  site.line = std::stoll(m[2].str());
  return site;
}

bool IsRuntimeFrame(const Frame& f) {
  static const char* const kPrefixes[] = {"__interceptor_", "__asan", "__lsan",
                                          "__ubsan", "__sanitizer", "___interceptor_"};
  for (const char* p : kPrefixes) {
    if (f.function.rfind(p, 0) == 0) return true;
  }
  static const char* const kAllocators[] = {"malloc", "calloc", "realloc",
                                            "free", "operator", "aligned_alloc"};
  for (const char* a : kAllocators) {
    if (f.function == a) return true;
  }
  return f.path.find("sanitizer") != std::string::npos ||
         f.path.find("compiler-rt") != std::string::npos;
}

std::string KindFromMessage(std::string_view msg) {
  msg = Trim(msg);
  for (std::string_view stop : {std::string_view(":"), std::string_view(" on "),
                                std::string_view(" 0x"), std::string_view(" (")}) {
    const std::size_t at = msg.find(stop);
    if (at != std::string_view::npos && at > 0) msg = msg.substr(0, at);
  }
  return std::string(Trim(msg));
}

SanitizerFinding Finish(Block& block) {
  SanitizerFinding f;
  f.tool = block.tool;
  f.kind = block.kind.empty() ? "unknown" : block.kind;
  std::optional<CrashSite> site = block.summary_site;
  if (!site) {
    for (const Frame& frame : block.frames) {
      if (!frame.path.empty() && !IsRuntimeFrame(frame)) {
        site = CrashSite{frame.path, frame.line, {}};
        break;
      }
    }
  }
  if (!site) site = block.own_site;
  if (!site) site = CrashSite{"<unknown>", 0, {}};
  f.site = *site;
  f.site.kind = f.kind;
  std::string stack;
  std::size_t used = 0;
  for (const Frame& frame : block.frames) {
    if (IsRuntimeFrame(frame)) continue;
    if (used++ == kHashFrames) break;
    stack += frame.function + "@" + frame.path + ":" +
             std::to_string(frame.line) + ";";
  }
  f.stack_hash = Fnv1a64(stack.empty() ? f.site.Key() : stack);
  f.raw_excerpt = std::move(block.excerpt);
  return f;
}

}  // namespace

std::string NormalizeSourcePath(std::string_view path) {
  static const std::string_view kRoots[] = {"ext/", "Zend/", "main/", "sapi/",
                                            "TSRM/"};
  std::size_t best = std::string_view::npos;
  for (std::string_view root : kRoots) {
    if (path.substr(0, root.size()) == root) return std::string(path);
    const std::size_t at = path.find("/" + std::string(root));
    if (at != std::string_view::npos && at < best) best = at;
  }
  if (best != std::string_view::npos) return std::string(path.substr(best + 1));
  while (path.substr(0, 2) == "./") path.remove_prefix(2);
  return std::string(path);
}

std::vector<SanitizerFinding> ParseSanitizer(std::string_view log) {
  static const std::regex kError(
      R"(^==\d+==ERROR: (\w+Sanitizer): (.*)$)");
  static const std::regex kFrame(
      R"(^\s*#\d+\s+0x[0-9a-fA-F]+\s+(?:in\s+(.+?)\s+)?(\S+)\s*$)");
  static const std::regex kSummary(R"(^SUMMARY: (\w+Sanitizer): (.*)$)");
  static const std::regex kRuntime(R"(^(\S+?:\d+(?::\d+)?): runtime error: (.*)$)");

  std::vector<SanitizerFinding> findings;
  std::optional<Block> block;
  auto flush = [&] {
    if (block) findings.push_back(Finish(*block));
    block.reset();
  };

  for (std::string_view raw : SplitLines(log)) {
    std::string line(raw);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    const bool maybe_report = line.find("Sanitizer") != std::string::npos ||
                              line.find("runtime error:") != std::string::npos ||
                              line.find('#') != std::string::npos;
    if (!maybe_report) {
      if (block && block->excerpt.size() < kExcerptCap) {
        block->excerpt += line + "\n";
      }
      continue;
    }
    if (std::regex_match(line, m, kError)) {
      flush();
      block.emplace();
      block->tool = m[1].str();
      block->kind = m[1].str() == "LeakSanitizer" ? "memory-leak"
                                                   : KindFromMessage(m[2].str());
    } else if (std::regex_match(line, m, kRuntime)) {
      flush();
      block.emplace();
      block->tool = "UndefinedBehaviorSanitizer";
      block->kind = KindFromMessage(m[2].str());
      block->own_site = ParseLocation(m[1].str());
    } else if (std::regex_match(line, m, kSummary)) {
      if (!block) {
        block.emplace();
        block->tool = m[1].str();
      }
      const std::string rest = m[2].str();
      std::size_t pos = 0;
      bool first = true;
      while (pos < rest.size()) {
        std::size_t end = rest.find(' ', pos);
        if (end == std::string::npos) end = rest.size();
        const std::string_view token(rest.data() + pos, end - pos);
        if (first) {
          if (block->kind.empty() && !token.empty() &&
              !std::isdigit(static_cast<unsigned char>(token[0]))) {
            block->kind = std::string(token);
          }
          first = false;
        } else if (auto site = ParseLocation(token)) {
          block->summary_site = site;
          break;
        }
        pos = end + 1;
      }
      block->excerpt += line + "\n";
      flush();
      continue;
    } else if (block && std::regex_match(line, m, kFrame)) {
      Frame frame;
      frame.function = m[1].str();
      if (auto site = ParseLocation(m[2].str())) {
        frame.path = site->path;
        frame.line = site->line;
      }
      block->frames.push_back(std::move(frame));
    }
    if (block && block->excerpt.size() < kExcerptCap) {
      block->excerpt += line + "\n";
    }
  }
  flush();
  return findings;
}

}  // namespace fusefuzz
