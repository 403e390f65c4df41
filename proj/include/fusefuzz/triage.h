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

#ifndef FUSEFUZZ_TRIAGE_H_
#define FUSEFUZZ_TRIAGE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fusefuzz/harness.h"
#include "fusefuzz/sanitizer.h"

namespace fusefuzz {

struct CrashRecord {
  CrashSite site;
  std::vector<std::string> kinds;  // distinct kinds seen at this site
  int64_t first_seen_ms = 0;       // unix epoch
  uint64_t seq = 0;                // insertion order, breaks first_seen ties
  uint64_t hits = 1;
  std::string exemplar;  // path of the stored test
  std::string test_id;
  uint64_t stack_hash = 0;
  bool verified = false;
  std::optional<bool> crashes_without_sanitizer;

  nlohmann::json ToJson() const;
  static CrashRecord FromJson(const nlohmann::json& j);
  bool operator==(const CrashRecord&) const = default;
};

enum class InsertResult { kNew, kDuplicate };

// Findings deduplicated by (path, line).
class CrashStore {
 public:
  InsertResult Insert(const SanitizerFinding& finding,
                      const std::string& exemplar, int64_t now_ms,
                      const std::string& test_id = {});

  const CrashRecord* Find(const CrashSite& site) const;
  CrashRecord* FindMutable(const CrashSite& site);
  void Put(CrashRecord record);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  uint64_t TotalHits() const;

  // Records ordered by first_seen, then insertion order.
  std::vector<CrashRecord> Snapshot() const;

  nlohmann::json ToJson() const;
  static CrashStore FromJson(const nlohmann::json& j);

  bool operator==(const CrashStore& other) const {
    return records_ == other.records_;
  }

 private:
  std::map<std::pair<std::string, int64_t>, CrashRecord> records_;
  uint64_t next_seq_ = 0;
};

// Append-only JSONL persistence: every change appends the full record and
// the last line per site wins. Compact() rewrites one line per record.
class CrashLog {
 public:
  explicit CrashLog(std::filesystem::path path,
                    std::size_t compact_every = 256);

  void Append(const CrashRecord& record);
  void Compact(const CrashStore& store);

  static CrashStore Load(const std::filesystem::path& path);

  const std::filesystem::path& path() const { return path_; }
  bool NeedsCompaction() const { return appended_ >= compact_every_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t compact_every_;
  std::size_t appended_ = 0;
};

// Re-executes the exemplar; verified iff the same site reappears. With
// `plain_target`, also records whether the non-sanitized build crashes.
// Throws kMissingExemplar.
bool Verify(CrashRecord& record, const TargetSpec& target,
            const TargetSpec* plain_target = nullptr,
            const std::filesystem::path& scratch = {});

std::string FormatReport(const CrashStore& store);
nlohmann::json ReportJson(const CrashStore& store);

}  // namespace fusefuzz

#endif  // FUSEFUZZ_TRIAGE_H_
