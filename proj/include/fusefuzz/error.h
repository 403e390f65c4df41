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

#ifndef FUSEFUZZ_ERROR_H_
#define FUSEFUZZ_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fusefuzz {

enum class ErrorCode {
  // corpus
  kNoSections,
  kTextBeforeFirstSection,
  kDuplicateSection,
  kMissingMandatorySection,
  kEmptyCorpus,
  kCorpusTooSmall,
  // dataflow / fusion
  kEmptyProgram,
  kNoChains,
  kOverlappingSites,
  // augment
  kAlreadyInjected,
  // harness / triage / reduce
  kSpawnFailure,
  kOutDirUnwritable,
  kMissingExemplar,
  kNotReproducible,
  // generic
  kInvalidArgument,
  kIo,
};

std::string_view ToString(ErrorCode code);

// All recoverable failures in the library are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ToString(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fusefuzz

#endif  // FUSEFUZZ_ERROR_H_
