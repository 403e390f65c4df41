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

#include "fusefuzz/rng.h"

#include <cstdio>
#include <limits>

#include "fusefuzz/error.h"

namespace fusefuzz {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoSections: return "NoSections";
    case ErrorCode::kTextBeforeFirstSection: return "TextBeforeFirstSection";
    case ErrorCode::kDuplicateSection: return "DuplicateSection";
    case ErrorCode::kMissingMandatorySection: return "MissingMandatorySection";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kCorpusTooSmall: return "CorpusTooSmall";
    case ErrorCode::kEmptyProgram: return "EmptyProgram";
    case ErrorCode::kNoChains: return "NoChains";
    case ErrorCode::kOverlappingSites: return "OverlappingSites";
    case ErrorCode::kAlreadyInjected: return "AlreadyInjected";
    case ErrorCode::kSpawnFailure: return "SpawnFailure";
    case ErrorCode::kOutDirUnwritable: return "OutDirUnwritable";
    case ErrorCode::kMissingExemplar: return "MissingExemplar";
    case ErrorCode::kNotReproducible: return "NotReproducible";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

uint64_t Rng::Uniform(uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "Uniform(0)");
  // Rejection sampling removes modulo bias.
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % n;
  uint64_t x;
  do {
    x = Next();
  } while (x >= limit);
  return x % n;
}

namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

uint64_t DeriveSeed(uint64_t campaign_seed, uint64_t worker,
                    uint64_t iteration) {
  uint64_t h = SplitMix64(campaign_seed);
  h = SplitMix64(h ^ worker);
  return SplitMix64(h ^ iteration);
}

uint64_t Fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string HexDigest(std::string_view data) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(data)));
  return buf;
}

}  // namespace fusefuzz
