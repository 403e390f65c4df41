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

#include "fusefuzz/corpus.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fusefuzz/error.h"
#include "spdlog/spdlog.h"

namespace fusefuzz {

namespace {

bool IsUpper(char c) { return c >= 'A' && c <= 'Z'; }
bool IsDigit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
           c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

const Section* TestCase::Find(std::string_view name) const {
  for (const Section& s : sections_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string_view TestCase::Body(std::string_view name) const {
  const Section* s = Find(name);
  return s ? std::string_view(s->body) : std::string_view();
}

void TestCase::Append(std::string name, std::string body) {
  if (Has(name)) throw Error(ErrorCode::kDuplicateSection, name);
  sections_.push_back({std::move(name), std::move(body)});
}

void TestCase::Set(std::string_view name, std::string body) {
  for (Section& s : sections_) {
    if (s.name == name) {
      s.body = std::move(body);
      return;
    }
  }
  sections_.push_back({std::string(name), std::move(body)});
}

bool TestCase::Remove(std::string_view name) {
  auto it = std::find_if(sections_.begin(), sections_.end(),
                         [&](const Section& s) { return s.name == name; });
  if (it == sections_.end()) return false;
  sections_.erase(it);
  return true;
}

bool TestCase::IsWellFormed() const {
  std::set<std::string_view> names;
  for (std::size_t i = 0; i < sections_.size(); ++i) {
    const Section& s = sections_[i];
    if (!IsSectionDelimiter("--" + s.name + "--")) return false;
    if (!names.insert(s.name).second) return false;
    // Serialization must not glue the next delimiter onto a body line or
    // let a body line read back as a delimiter.
    if (i + 1 < sections_.size() && !s.body.empty() && s.body.back() != '\n') {
      return false;
    }
    for (std::string_view line : SplitLines(s.body)) {
      if (IsSectionDelimiter(line)) return false;
    }
  }
  return names.count("TEST") && names.count("FILE");
}

std::string TestCase::Id() const { return HexDigest(SerializePhpt(*this)); }

bool IsSectionDelimiter(std::string_view line, std::string* name) {
  if (line.size() < 5 || line.substr(0, 2) != "--" ||
      line.substr(line.size() - 2) != "--") {
    return false;
  }
  const std::string_view inner = line.substr(2, line.size() - 4);
  if (!(IsUpper(inner[0]) || inner[0] == '_')) return false;
  for (char c : inner) {
    if (!(IsUpper(c) || IsDigit(c) || c == '_')) return false;
  }
  if (name) *name = std::string(inner);
  return true;
}

TestCase ParsePhpt(std::string_view text, std::string source_path) {
  std::vector<Section> sections;
  std::set<std::string> seen;
  std::size_t pos = 0;
  bool leading_text = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    const std::size_t line_end = nl == std::string_view::npos ? text.size() : nl;
    const std::size_t next = nl == std::string_view::npos ? text.size() : nl + 1;
    std::string name;
    if (IsSectionDelimiter(text.substr(pos, line_end - pos), &name)) {
      if (!seen.insert(name).second) {
        throw Error(ErrorCode::kDuplicateSection, name);
      }
      sections.push_back({std::move(name), {}});
    } else if (sections.empty()) {
      leading_text = true;
    } else {
      sections.back().body.append(text.substr(pos, next - pos));
    }
    pos = next;
  }
  if (sections.empty()) throw Error(ErrorCode::kNoSections, source_path);
  if (leading_text) {
    throw Error(ErrorCode::kTextBeforeFirstSection, source_path);
  }
  TestCase test(std::move(sections), std::move(source_path));
  for (const char* required : {"TEST", "FILE"}) {
    if (!test.Has(required)) {
      throw Error(ErrorCode::kMissingMandatorySection, required);
    }
  }
  return test;
}

std::string SerializePhpt(const TestCase& test) {
  std::string out;
  for (const Section& s : test.sections()) {
    out += "--";
    out += s.name;
    out += "--\n";
    out += s.body;
  }
  return out;
}

CorpusLoad LoadCorpus(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::kIo, "not a directory: " + root.string());
  }
  std::vector<fs::path> paths;
  for (auto it = fs::recursive_directory_iterator(
           root, fs::directory_options::skip_permission_denied, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (it->is_regular_file(ec) && it->path().extension() == ".phpt") {
      paths.push_back(it->path());
    }
  }
  std::sort(paths.begin(), paths.end());

  CorpusLoad load;
  for (const fs::path& path : paths) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) {
      load.skipped.push_back({path, "unreadable"});
      spdlog::warn("skipping {}: unreadable", path.string());
      continue;
    }
    try {
      load.tests.push_back(ParsePhpt(buf.str(), path.string()));
    } catch (const Error& e) {
      load.skipped.push_back({path, e.what()});
      spdlog::warn("skipping {}: {}", path.string(), e.what());
    }
  }
  if (load.tests.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, root.string());
  }
  return load;
}

std::pair<std::size_t, std::size_t> PickSeedIndices(std::size_t size,
                                                    Rng& rng) {
  if (size < 2) {
    throw Error(ErrorCode::kCorpusTooSmall,
                "need at least 2 tests, have " + std::to_string(size));
  }
  const std::size_t first = rng.Uniform(size);
  std::size_t second = rng.Uniform(size - 1);
  if (second >= first) ++second;
  return {first, second};
}

std::pair<const TestCase*, const TestCase*> PickSeeds(
    std::span<const TestCase> corpus, Rng& rng) {
  auto [a, b] = PickSeedIndices(corpus.size(), rng);
  return {&corpus[a], &corpus[b]};
}

std::optional<std::pair<std::string, std::string>> ParseIniLine(
    std::string_view line) {
  line = Trim(line);
  if (line.empty() || line.front() == ';' || line.front() == '#') {
    return std::nullopt;
  }
  const std::size_t eq = line.find('=');
  if (eq == std::string_view::npos) return std::nullopt;
  const std::string_view key = Trim(line.substr(0, eq));
  if (key.empty()) return std::nullopt;
  return std::make_pair(std::string(key),
                        std::string(Trim(line.substr(eq + 1))));
}

void IniDictionary::Add(const std::string& key, const std::string& value) {
  auto& values = entries_[key];
  if (std::find(values.begin(), values.end(), value) == values.end()) {
    values.push_back(value);
  }
}

void IniDictionary::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (auto kv = ParseIniLine(line)) Add(kv->first, kv->second);
  }
}

bool IniDictionary::Contains(std::string_view key,
                             std::string_view value) const {
  auto it = entries_.find(std::string(key));
  if (it == entries_.end()) return false;
  return std::find(it->second.begin(), it->second.end(), value) !=
         it->second.end();
}

IniDictionary BuildIniDictionary(std::span<const TestCase> corpus) {
  IniDictionary dict;
  for (const TestCase& test : corpus) {
    for (std::string_view line : SplitLines(test.Body("INI"))) {
      if (Trim(line).empty()) continue;
      if (auto kv = ParseIniLine(line)) {
        dict.Add(kv->first, kv->second);
      } else if (Trim(line).front() != ';' && Trim(line).front() != '#') {
        spdlog::debug("{}: ignoring INI line '{}'", test.source_path(), line);
      }
    }
  }
  return dict;
}

}  // namespace fusefuzz
