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

#include "fusefuzz/reduce.h"

#include <algorithm>
#include <map>
#include <vector>

#include <spdlog/spdlog.h>

#include "fusefuzz/augment.h"
#include "fusefuzz/error.h"
#include "fusefuzz/rng.h"

namespace fusefuzz {

namespace {

struct Lines {
  std::vector<std::string> text;
  bool trailing_newline = false;
};

Lines SplitBody(std::string_view body) {
  Lines lines;
  for (std::string_view l : SplitLines(body)) lines.text.emplace_back(l);
  lines.trailing_newline = !body.empty() && body.back() == '\n';
  return lines;
}

class Reducer {
 public:
  Reducer(const TestCase& test, const CrashPredicate& crashes,
          std::size_t budget)
      : test_(test), crashes_(crashes), budget_(budget) {}

  ReductionResult Run() {
    lines_ = SplitBody(test_.Body("FILE"));
    result_.original_lines = lines_.text.size();
    active_.assign(lines_.text.size(), true);
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < lines_.text.size(); ++i) {
      if (!IsProtectedLine(lines_.text[i])) candidates.push_back(i);
    }

    if (!Holds(test_)) {
      throw Error(ErrorCode::kNotReproducible,
                  "input does not exhibit the failure");
    }
    Ddmin(candidates);
    ReduceSections();
    Finish();
    return std::move(result_);
  }

 private:
  bool Holds(const TestCase& candidate) {
    const std::string key = SerializePhpt(candidate);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    if (result_.predicate_runs >= budget_) {
      result_.budget_exhausted = true;
      return false;
    }
    ++result_.predicate_runs;
    const bool holds = crashes_(candidate);
    cache_.emplace(key, holds);
    return holds;
  }

  std::string Render(const std::vector<bool>& active, bool drop) const {
    std::string body;
    for (std::size_t i = 0; i < lines_.text.size(); ++i) {
      if (!active[i]) {
        if (drop) continue;
        body += kLineComment;
      }
      body += lines_.text[i];
      if (i + 1 < lines_.text.size() || lines_.trailing_newline) body += "\n";
    }
    return body;
  }

  TestCase WithBody(const TestCase& base, std::string body) const {
    TestCase t = base;
    t.Set("FILE", std::move(body));
    return t;
  }

  // Removes chunks of `candidates` while the failure persists.
  void Ddmin(std::vector<std::size_t> alive) {
    std::size_t n = 2;
    while (!alive.empty()) {
      ++result_.iterations;
      const std::size_t chunk = (alive.size() + n - 1) / n;
      bool reduced = false;
      for (std::size_t start = 0; start < alive.size(); start += chunk) {
        const std::size_t end = std::min(alive.size(), start + chunk);
        std::vector<bool> trial = active_;
        for (std::size_t k = start; k < end; ++k) trial[alive[k]] = false;
        if (Holds(WithBody(current_, Render(trial, false)))) {
          active_ = std::move(trial);
          alive.erase(alive.begin() + start, alive.begin() + end);
          n = std::max<std::size_t>(n - 1, 2);
          reduced = true;
          break;
        }
        if (result_.budget_exhausted) return;
      }
      if (reduced) continue;
      if (n >= alive.size()) break;
      n = std::min(n * 2, alive.size());
    }
  }

  void ReduceSections() {
    current_ = WithBody(current_, Render(active_, false));
    auto try_candidate = [&](TestCase candidate) {
      if (result_.budget_exhausted) return false;
      if (!Holds(candidate)) return false;
      current_ = std::move(candidate);
      return true;
    };
    for (const char* name : {"INI", "EXTENSIONS"}) {
      if (!current_.Has(name)) continue;
      std::vector<std::string> entries;
      for (std::string_view l : SplitLines(current_.Body(name))) {
        entries.emplace_back(l);
      }
      for (std::size_t i = 0; i < entries.size();) {
        std::string body;
        for (std::size_t k = 0; k < entries.size(); ++k) {
          if (k != i) body += entries[k] + "\n";
        }
        TestCase candidate = current_;
        candidate.Set(name, body);
        if (try_candidate(std::move(candidate))) {
          entries.erase(entries.begin() + i);
        } else {
          ++i;
        }
      }
    }
    std::vector<std::string> optional;
    for (const Section& s : current_.sections()) {
      if (s.name != "TEST" && s.name != "FILE" &&
          s.name.substr(0, 6) != "EXPECT") {
        optional.push_back(s.name);
      }
    }
    for (const std::string& name : optional) {
      TestCase candidate = current_;
      candidate.Remove(name);
      try_candidate(std::move(candidate));
    }
  }

  void Finish() {
    TestCase deleted = WithBody(current_, Render(active_, true));
    if (std::count(active_.begin(), active_.end(), false) > 0 &&
        !result_.budget_exhausted && Holds(deleted)) {
      result_.reduced_test = std::move(deleted);
      result_.reduced_lines =
          SplitLines(result_.reduced_test.Body("FILE")).size();
    } else {
      if (std::count(active_.begin(), active_.end(), false) > 0) {
        spdlog::info("deleting commented lines loses the failure; keeping them");
      }
      result_.reduced_test = current_;
      // Commented-out lines do not count.
      result_.reduced_lines = static_cast<std::size_t>(
          std::count(active_.begin(), active_.end(), true));
    }
  }

  const TestCase& test_;
  const CrashPredicate& crashes_;
  const std::size_t budget_;
  TestCase current_ = test_;
  Lines lines_;
  std::vector<bool> active_;
  std::map<std::string, bool> cache_;
  ReductionResult result_;
};

}  // namespace

bool IsProtectedLine(std::string_view line) {
  const std::string_view t = Trim(line);
  return t.substr(0, 2) == "<?" || t == "?>" || t == kPrologueMarker ||
         t == kEpilogueMarker;
}

ReductionResult Reduce(const TestCase& test, const CrashPredicate& crashes,
                       std::size_t budget) {
  return Reducer(test, crashes, budget).Run();
}

ReductionResult Reduce(const TestCase& test, const TargetSpec& target,
                       const CrashSite& site, std::size_t budget,
                       const std::filesystem::path& scratch) {
  const std::filesystem::path dir =
      scratch.empty() ? std::filesystem::temp_directory_path() : scratch;
  const std::filesystem::path stem = dir / ("reduce-" + test.Id());
  CrashPredicate same_site = [&](const TestCase& candidate) {
    const ExecutionOutcome outcome = RunTest(candidate, target, stem);
    return std::any_of(
        outcome.findings.begin(), outcome.findings.end(),
        [&](const SanitizerFinding& f) { return f.site.SameSite(site); });
  };
  ReductionResult result = Reduce(test, same_site, budget);
  std::error_code ec;
  std::filesystem::remove(stem.string() + ".php", ec);
  std::filesystem::remove(stem.string() + ".phpt", ec);
  return result;
}

}  // namespace fusefuzz
