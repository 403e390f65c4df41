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

#include "fusefuzz/dataflow.h"

#include <algorithm>
#include <numeric>

#include "fusefuzz/error.h"

namespace fusefuzz {

namespace {

bool Tracked(const VarOccurrence& occ) { return !occ.local; }

bool ChainEligible(const VarOccurrence& occ) {
  return !occ.local && !occ.reserved;
}

}  // namespace

FlowSets ComputeFlowSets(const Program& program) {
  const std::size_t n = program.statements.size();
  if (n == 0) throw Error(ErrorCode::kEmptyProgram, "no statements");
  FlowSets fs;
  fs.in.resize(n);
  fs.out.resize(n);
  fs.gen.resize(n);
  fs.kill.resize(n);
  fs.fun.resize(n);

  // Every definition generated so far, per variable.
  std::map<std::string, std::vector<Definition>> prior;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::string> overwritten;
    for (const VarOccurrence& occ : program.statements[i].occurrences) {
      if (!Tracked(occ) || !occ.IsDef()) continue;
      fs.gen[i].insert({occ.name, i});
      if (occ.call_result) fs.fun[i].insert({occ.name, i});
      if (occ.role == Role::kDef) overwritten.insert(occ.name);
    }
    for (const std::string& var : overwritten) {
      for (const Definition& d : prior[var]) fs.kill[i].insert(d);
    }
    if (i > 0) fs.in[i] = fs.out[i - 1];
    DefinitionSet out = fs.gen[i];
    for (const Definition& d : fs.in[i]) {
      if (!fs.kill[i].count(d)) out.insert(d);
    }
    out.insert(fs.fun[i].begin(), fs.fun[i].end());
    fs.out[i] = std::move(out);
    for (const Definition& d : fs.gen[i]) prior[d.var].push_back(d);
  }
  return fs;
}

std::vector<DataflowChain> FindChains(const FlowSets& flow,
                                      const Program& program) {
  if (flow.size() != program.statements.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "flow sets were computed for a different program");
  }
  // Variables in order of first occurrence.
  std::vector<std::string> order;
  std::map<std::string, std::size_t> id;
  std::map<std::string, std::vector<Site>> sites;
  for (const Statement& s : program.statements) {
    for (const VarOccurrence& occ : s.occurrences) {
      if (!ChainEligible(occ)) continue;
      if (id.emplace(occ.name, order.size()).second) order.push_back(occ.name);
      sites[occ.name].push_back({s.index, occ.range, occ.role});
    }
  }

  std::vector<std::size_t> parent(order.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  // A use of v in a statement that defines w links v and w. Statements are
  // nodes, so a compound statement links everything it uses to everything
  // it defines.
  for (std::size_t i = 0; i < program.statements.size(); ++i) {
    const Statement& s = program.statements[i];
    std::set<std::string> uses, defs;
    for (const VarOccurrence& occ : s.occurrences) {
      if (!ChainEligible(occ)) continue;
      if (occ.IsUse()) uses.insert(occ.name);
      if (occ.IsDef()) defs.insert(occ.name);
    }
    for (const std::string& d : defs) {
      for (const std::string& u : uses) {
        if (u != d) unite(id[u], id[d]);
      }
    }
  }

  std::map<std::size_t, std::size_t> chain_of_root;
  std::vector<DataflowChain> chains;
  for (std::size_t v = 0; v < order.size(); ++v) {
    const std::size_t root = find(v);
    auto [it, inserted] = chain_of_root.emplace(root, chains.size());
    if (inserted) chains.emplace_back();
    DataflowChain& chain = chains[it->second];
    chain.variables.push_back(order[v]);
    chain.sites[order[v]] = std::move(sites[order[v]]);
  }
  for (DataflowChain& chain : chains) chain.weight = chain.variables.size();
  return chains;
}

std::size_t SelectChain(std::span<const DataflowChain> chains, Rng& rng) {
  if (chains.empty()) throw Error(ErrorCode::kNoChains, "no dataflow chains");
  std::size_t total = 0;
  for (const DataflowChain& c : chains) total += c.weight;
  if (total == 0) return rng.Uniform(chains.size());
  std::size_t pick = rng.Uniform(total);
  for (std::size_t i = 0; i < chains.size(); ++i) {
    if (pick < chains[i].weight) return i;
    pick -= chains[i].weight;
  }
  return chains.size() - 1;
}

std::string FormatChain(const DataflowChain& chain) {
  std::string out;
  for (std::size_t i = 0; i < chain.variables.size(); ++i) {
    if (i) out += "→";
    out += "[$" + chain.variables[i] + "]";
  }
  out += " (w=" + std::to_string(chain.weight) + ")";
  return out;
}

}  // namespace fusefuzz
