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

#ifndef FUSEFUZZ_TESTS_SUPPORT_FLOW_ORACLE_H_
#define FUSEFUZZ_TESTS_SUPPORT_FLOW_ORACLE_H_

// Random straight-line programs with known def/use roles, and reaching
// definitions computed straight from the definition of "reaches" by
// scanning every path segment. No transfer functions involved.

#include <cstddef>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fusefuzz/rng.h"

namespace fusefuzz::testing {

enum class Effect { kOverwrite, kUpdate };  // pure def / partial update

struct Write {
  std::string var;
  Effect effect;
  bool call;  // right-hand side calls a function on a variable
};

struct GeneratedStatement {
  std::string text;
  std::vector<Write> writes;
};

using Fact = std::pair<std::string, std::size_t>;  // (variable, statement)
using Facts = std::set<Fact>;

struct OracleSets {
  std::vector<Facts> in, out, gen, kill, fun;
};

inline std::vector<GeneratedStatement> RandomProgram(Rng& rng,
                                                     std::size_t max_len) {
  static const char* const kVars[] = {"a", "b", "c", "d", "e"};
  auto var = [&] { return std::string(kVars[rng.Uniform(5)]); };
  std::vector<GeneratedStatement> prog(1 + rng.Uniform(max_len));
  for (GeneratedStatement& s : prog) {
    const std::string v = var(), u = var(), w = var();
    switch (rng.Uniform(10)) {
      case 0:
        s = {"$" + v + " = " + std::to_string(rng.Uniform(100)) + ";",
             {{v, Effect::kOverwrite, false}}};
        break;
      case 1:
        s = {"$" + v + " = $" + u + ";", {{v, Effect::kOverwrite, false}}};
        break;
      case 2:
        s = {"$" + v + " = $" + u + " + $" + w + ";",
             {{v, Effect::kOverwrite, false}}};
        break;
      case 3:
        s = {"$" + v + " = strlen($" + u + ");",
             {{v, Effect::kOverwrite, true}}};
        break;
      case 4:
        s = {"$" + v + " = time();", {{v, Effect::kOverwrite, false}}};
        break;
      case 5:
        s = {"$" + v + "[] = $" + u + ";", {{v, Effect::kUpdate, false}}};
        break;
      case 6:
        s = {"$" + v + "++;", {{v, Effect::kUpdate, false}}};
        break;
      case 7:
        s = {"$" + v + "->p = f($" + u + ");", {{v, Effect::kUpdate, true}}};
        break;
      case 8:
        s = {"echo $" + u + ";", {}};
        break;
      default:
        s = {"$" + v + " .= $" + u + ";", {{v, Effect::kOverwrite, false}}};
        break;
    }
  }
  return prog;
}

inline std::string RenderProgram(const std::vector<GeneratedStatement>& prog) {
  std::string out = "<?php\n";
  for (const GeneratedStatement& s : prog) out += s.text + "\n";
  return out;
}

inline OracleSets BruteForceFlow(const std::vector<GeneratedStatement>& prog) {
  const std::size_t n = prog.size();
  auto writes = [&](std::size_t i, const std::string& v, bool only_overwrite) {
    for (const Write& w : prog[i].writes) {
      if (w.var == v && (!only_overwrite || w.effect == Effect::kOverwrite)) {
        return true;
      }
    }
    return false;
  };
  // (v, j) is live after statement i iff v is written at j <= i and no
  // statement in (j, i] overwrites v.
  auto live_after = [&](const std::string& v, std::size_t j, std::size_t i) {
    if (j > i || !writes(j, v, false)) return false;
    for (std::size_t k = j + 1; k <= i; ++k) {
      if (writes(k, v, true)) return false;
    }
    return true;
  };
  OracleSets o;
  o.in.resize(n);
  o.out.resize(n);
  o.gen.resize(n);
  o.kill.resize(n);
  o.fun.resize(n);
  std::set<std::string> vars;
  for (const GeneratedStatement& s : prog) {
    for (const Write& w : s.writes) vars.insert(w.var);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (const std::string& v : vars) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i > 0 && live_after(v, j, i - 1)) o.in[i].insert({v, j});
        if (live_after(v, j, i)) o.out[i].insert({v, j});
        if (j < i && writes(j, v, false) && writes(i, v, true)) {
          o.kill[i].insert({v, j});
        }
      }
    }
    for (const Write& w : prog[i].writes) {
      o.gen[i].insert({w.var, i});
      if (w.call) o.fun[i].insert({w.var, i});
    }
  }
  return o;
}

}  // namespace fusefuzz::testing

#endif  // FUSEFUZZ_TESTS_SUPPORT_FLOW_ORACLE_H_
