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

#ifndef FUSEFUZZ_RNG_H_
#define FUSEFUZZ_RNG_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace fusefuzz {

// Seeded random source. Draws are defined only in terms of the raw
// mt19937_64 stream (no std distributions), so sequences are identical
// across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform integer in [0, n). Requires n > 0.
  uint64_t Uniform(uint64_t n);

  // Uniform double in [0, 1) with 53 bits of precision.
  double Canonical() {
    return static_cast<double>(Next() >> 11) * 0x1.0p-53;
  }

  // True with probability p. p <= 0 never fires; p >= 1 always does.
  bool Bernoulli(double p) { return Canonical() < p; }

 private:
  std::mt19937_64 engine_;
};

// Per-iteration seed for a campaign worker. Pure function of its inputs so a
// recorded (seed, worker, iteration) triple replays independently of
// scheduling.
uint64_t DeriveSeed(uint64_t campaign_seed, uint64_t worker,
                    uint64_t iteration);

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::string_view data);

// 16 lowercase hex digits of Fnv1a64(data).
std::string HexDigest(std::string_view data);

}  // namespace fusefuzz

#endif  // FUSEFUZZ_RNG_H_
