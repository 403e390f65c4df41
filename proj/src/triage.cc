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

#include "fusefuzz/triage.h"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "fusefuzz/error.h"

namespace fusefuzz {

using nlohmann::json;

json CrashRecord::ToJson() const {
  json j;
  j["site"] = {{"path", site.path}, {"line", site.line}};
  j["kind"] = site.kind;
  j["kinds"] = kinds;
  j["hits"] = hits;
  j["first_seen"] = first_seen_ms;
  j["seq"] = seq;
  j["exemplar"] = exemplar;
  j["test_id"] = test_id;
  j["stack_hash"] = stack_hash;
  j["verified"] = verified;
  j["crashes_without_sanitizer"] =
      crashes_without_sanitizer ? json(*crashes_without_sanitizer) : json();
  return j;
}

CrashRecord CrashRecord::FromJson(const json& j) {
  CrashRecord r;
  r.site.path = j.at("site").at("path").get<std::string>();
  r.site.line = j.at("site").at("line").get<int64_t>();
  r.site.kind = j.value("kind", "");
  r.kinds = j.value("kinds", std::vector<std::string>{});
  r.hits = j.value("hits", uint64_t{1});
  r.first_seen_ms = j.value("first_seen", int64_t{0});
  r.seq = j.value("seq", uint64_t{0});
  r.exemplar = j.value("exemplar", "");
  r.test_id = j.value("test_id", "");
  r.stack_hash = j.value("stack_hash", uint64_t{0});
  r.verified = j.value("verified", false);
  if (j.contains("crashes_without_sanitizer") &&
      !j["crashes_without_sanitizer"].is_null()) {
    r.crashes_without_sanitizer = j["crashes_without_sanitizer"].get<bool>();
  }
  return r;
}

InsertResult CrashStore::Insert(const SanitizerFinding& finding,
                                const std::string& exemplar, int64_t now_ms,
                                const std::string& test_id) {
  const auto key = std::make_pair(finding.site.path, finding.site.line);
  auto it = records_.find(key);
  if (it != records_.end()) {
    CrashRecord& r = it->second;
    ++r.hits;
    if (std::find(r.kinds.begin(), r.kinds.end(), finding.kind) ==
        r.kinds.end()) {
      r.kinds.push_back(finding.kind);
    }
    return InsertResult::kDuplicate;
  }
  CrashRecord r;
  r.site = finding.site;
  r.site.kind = finding.kind;
  r.kinds = {finding.kind};
  r.first_seen_ms = now_ms;
  r.seq = next_seq_++;
  r.exemplar = exemplar;
  r.test_id = test_id;
  r.stack_hash = finding.stack_hash;
  records_.emplace(key, std::move(r));
  return InsertResult::kNew;
}

const CrashRecord* CrashStore::Find(const CrashSite& site) const {
  auto it = records_.find({site.path, site.line});
  return it == records_.end() ? nullptr : &it->second;
}

CrashRecord* CrashStore::FindMutable(const CrashSite& site) {
  auto it = records_.find({site.path, site.line});
  return it == records_.end() ? nullptr : &it->second;
}

void CrashStore::Put(CrashRecord record) {
  next_seq_ = std::max(next_seq_, record.seq + 1);
  const auto key = std::make_pair(record.site.path, record.site.line);
  records_[key] = std::move(record);
}

uint64_t CrashStore::TotalHits() const {
  uint64_t total = 0;
  for (const auto& [key, r] : records_) total += r.hits;
  return total;
}

std::vector<CrashRecord> CrashStore::Snapshot() const {
  std::vector<CrashRecord> out;
  for (const auto& [key, r] : records_) out.push_back(r);
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return std::tie(x.first_seen_ms, x.seq) < std::tie(y.first_seen_ms, y.seq);
  });
  return out;
}

json CrashStore::ToJson() const {
  json j = json::array();
  for (const CrashRecord& r : Snapshot()) j.push_back(r.ToJson());
  return j;
}

CrashStore CrashStore::FromJson(const json& j) {
  CrashStore store;
  for (const json& r : j) store.Put(CrashRecord::FromJson(r));
  return store;
}

CrashLog::CrashLog(std::filesystem::path path, std::size_t compact_every)
    : path_(std::move(path)),
      out_(path_, std::ios::app),
      compact_every_(compact_every) {
  if (!out_) throw Error(ErrorCode::kOutDirUnwritable, path_.string());
}

void CrashLog::Append(const CrashRecord& record) {
  out_ << record.ToJson().dump() << "\n";
  out_.flush();
  ++appended_;
}

void CrashLog::Compact(const CrashStore& store) {
  out_.close();
  const std::filesystem::path tmp = path_.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    for (const CrashRecord& r : store.Snapshot()) {
      out << r.ToJson().dump() << "\n";
    }
    if (!out) throw Error(ErrorCode::kIo, tmp.string());
  }
  std::filesystem::rename(tmp, path_);
  out_.open(path_, std::ios::app);
  appended_ = 0;
}

CrashStore CrashLog::Load(const std::filesystem::path& path) {
  CrashStore store;
  std::ifstream in(path);
  if (!in) return store;
  std::string line;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    // A torn final line from an interrupted campaign is skipped.
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) continue;
    store.Put(CrashRecord::FromJson(j));
  }
  return store;
}

bool Verify(CrashRecord& record, const TargetSpec& target,
            const TargetSpec* plain_target,
            const std::filesystem::path& scratch) {
  std::ifstream in(record.exemplar, std::ios::binary);
  if (record.exemplar.empty() || !in) {
    throw Error(ErrorCode::kMissingExemplar, record.exemplar);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const TestCase test = ParsePhpt(buf.str(), record.exemplar);
  const std::filesystem::path dir =
      scratch.empty() ? std::filesystem::temp_directory_path() : scratch;
  const std::filesystem::path stem =
      dir / ("verify-" + record.test_id + "-" + std::to_string(record.seq));
  const ExecutionOutcome outcome = RunTest(test, target, stem);
  record.verified = std::any_of(
      outcome.findings.begin(), outcome.findings.end(),
      [&](const SanitizerFinding& f) { return f.site.SameSite(record.site); });
  if (plain_target) {
    const ExecutionOutcome plain = RunTest(test, *plain_target, stem);
    record.crashes_without_sanitizer =
        plain.status == ExitStatus::kCrash;
  }
  std::error_code ec;
  std::filesystem::remove(stem.string() + ".php", ec);
  std::filesystem::remove(stem.string() + ".phpt", ec);
  return record.verified;
}

std::string FormatReport(const CrashStore& store) {
  std::ostringstream out;
  out << "#  site                                     hits  kinds                 verified  exemplar\n";
  std::size_t row = 0;
  for (const CrashRecord& r : store.Snapshot()) {
    std::string kinds;
    for (const std::string& k : r.kinds) kinds += (kinds.empty() ? "" : ",") + k;
    char line[512];
    std::snprintf(line, sizeof(line), "%-2zu %-40s %5llu  %-21s %-9s %s\n",
                  ++row, r.site.Key().c_str(),
                  static_cast<unsigned long long>(r.hits), kinds.c_str(),
                  r.verified ? "yes" : "no", r.exemplar.c_str());
    out << line;
  }
  out << store.size() << " unique crash site(s), " << store.TotalHits()
      << " hit(s)\n";
  return out.str();
}

json ReportJson(const CrashStore& store) { return store.ToJson(); }

}  // namespace fusefuzz
