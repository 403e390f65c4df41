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

#ifndef FUSEFUZZ_CORPUS_H_
#define FUSEFUZZ_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fusefuzz/rng.h"

namespace fusefuzz {

// One `--NAME--` section. The body is the raw text between the delimiter
// line and the next delimiter, including its final newline.
struct Section {
  std::string name;
  std::string body;

  bool operator==(const Section&) const = default;
};

// An ordered collection of phpt sections.
class TestCase {
 public:
  TestCase() = default;
  explicit TestCase(std::vector<Section> sections, std::string source_path = {})
      : sections_(std::move(sections)), source_path_(std::move(source_path)) {}

  const std::vector<Section>& sections() const { return sections_; }
  const std::string& source_path() const { return source_path_; }
  void set_source_path(std::string path) { source_path_ = std::move(path); }

  const Section* Find(std::string_view name) const;
  bool Has(std::string_view name) const { return Find(name) != nullptr; }
  // Body of `name`, or empty when absent.
  std::string_view Body(std::string_view name) const;

  // Appends a section. Throws kDuplicateSection if `name` exists.
  void Append(std::string name, std::string body);
  // Replaces the body of `name`, appending the section when absent.
  void Set(std::string_view name, std::string body);
  bool Remove(std::string_view name);

  // Contains TEST and FILE and no duplicate names.
  bool IsWellFormed() const;

  // Stable hash of the serialized form.
  std::string Id() const;

  // Section lists compare equal; source_path is not part of identity.
  bool operator==(const TestCase& other) const {
    return sections_ == other.sections_;
  }

 private:
  std::vector<Section> sections_;
  std::string source_path_;
};

// True iff `line` (without newline) is a section delimiter; stores the name.
bool IsSectionDelimiter(std::string_view line, std::string* name = nullptr);

// Parses phpt text. Throws Error with kNoSections, kTextBeforeFirstSection,
// kDuplicateSection or kMissingMandatorySection.
TestCase ParsePhpt(std::string_view text, std::string source_path = {});

std::string SerializePhpt(const TestCase& test);

struct SkippedFile {
  std::filesystem::path path;
  std::string reason;
};

struct CorpusLoad {
  std::vector<TestCase> tests;
  std::vector<SkippedFile> skipped;
};

// Recursively loads every *.phpt file under `root`, sorted by path.
// Unparseable files are skipped and logged. Throws kEmptyCorpus when nothing
// parses and kIo when `root` is not a directory.
CorpusLoad LoadCorpus(const std::filesystem::path& root);

// Two distinct uniformly drawn indices into a corpus of `size` tests.
// Throws kCorpusTooSmall when size < 2.
std::pair<std::size_t, std::size_t> PickSeedIndices(std::size_t size, Rng& rng);

std::pair<const TestCase*, const TestCase*> PickSeeds(
    std::span<const TestCase> corpus, Rng& rng);

// Parses one `key=value` INI line. Blank lines, `;`/`#` comments and lines
// without '=' or with an empty key yield nullopt.
std::optional<std::pair<std::string, std::string>> ParseIniLine(
    std::string_view line);

// INI options observed across a corpus: key -> distinct values in first-seen
// order.
class IniDictionary {
 public:
  void Add(const std::string& key, const std::string& value);
  // Loads a supplemental `key=value` file (`#` comments). Throws kIo.
  void LoadFile(const std::filesystem::path& path);

  const std::map<std::string, std::vector<std::string>>& entries() const {
    return entries_;
  }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  bool Contains(std::string_view key, std::string_view value) const;

  bool operator==(const IniDictionary&) const = default;

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

IniDictionary BuildIniDictionary(std::span<const TestCase> corpus);

// Splits text into lines without their terminating '\n'. A trailing newline
// does not produce an empty final line.
std::vector<std::string_view> SplitLines(std::string_view text);

std::string_view Trim(std::string_view s);

}  // namespace fusefuzz

#endif  // FUSEFUZZ_CORPUS_H_
