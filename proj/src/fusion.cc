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

#include "fusefuzz/fusion.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "fusefuzz/error.h"

namespace fusefuzz {

namespace {

bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool MentionsVariable(std::string_view text, std::string_view name) {
  const std::string needle = "$" + std::string(name);
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + 1)) {
    const std::size_t end = pos + needle.size();
    if (end >= text.size() || !IsWordChar(text[end])) return true;
  }
  return false;
}

// Statement texts of `program` with the planned sites rewritten.
std::vector<std::string> RewriteSide(const Program& program,
                                     const FusionSide& side,
                                     const std::string& shared) {
  std::vector<std::string> texts;
  for (const Statement& s : program.statements) texts.push_back(s.text);
  if (!side.active) return texts;

  std::map<std::size_t, std::vector<ByteRange>> by_statement;
  for (const Site& site : side.sites) {
    by_statement[site.statement].push_back(site.range);
  }
  const std::string expected = "$" + side.variable;
  for (auto& [index, ranges] : by_statement) {
    if (index >= texts.size()) {
      throw Error(ErrorCode::kOverlappingSites,
                  "site in statement " + std::to_string(index) +
                      " outside the program");
    }
    std::sort(ranges.begin(), ranges.end());
    for (std::size_t i = 1; i < ranges.size(); ++i) {
      if (ranges[i].begin < ranges[i - 1].end) {
        throw Error(ErrorCode::kOverlappingSites,
                    "overlapping sites in statement " + std::to_string(index));
      }
    }
    std::string& text = texts[index];
    for (auto it = ranges.rbegin(); it != ranges.rend(); ++it) {
      if (it->end > text.size() ||
          std::string_view(text).substr(it->begin, it->size()) != expected) {
        throw Error(ErrorCode::kOverlappingSites,
                    "site does not name " + expected + " in statement " +
                        std::to_string(index));
      }
      text.replace(it->begin, it->size(), "$" + shared);
    }
  }
  return texts;
}

// Appends `;` when the code does not already end a statement or block.
void TerminateStatement(std::string& code) {
  std::string_view last;
  for (const Token& t : Tokenize(code)) {
    if (IsTrivia(t) || t.kind == TokenKind::kCloseTag) continue;
    last = TokenText(code, t);
  }
  if (!last.empty() && last != ";" && last != "}") code += ";";
}

// Trailing trivia of `postamble` before its closing tag.
std::string_view StripCloseTag(std::string_view postamble) {
  for (const Token& t : Tokenize(postamble)) {
    if (t.kind == TokenKind::kCloseTag) return postamble.substr(0, t.begin);
  }
  return postamble;
}

std::string RenameIdentifiers(std::string_view text,
                              const std::map<std::string, std::string>& map) {
  std::string out;
  std::size_t copied = 0;
  std::string_view prev;
  for (const Token& t : Tokenize(text)) {
    if (IsTrivia(t)) continue;
    const std::string_view tok = TokenText(text, t);
    if (t.kind == TokenKind::kIdentifier && prev != "->" && prev != "?->" &&
        prev != "::") {
      auto it = map.find(Lower(tok));
      if (it != map.end()) {
        out.append(text.substr(copied, t.begin - copied));
        out += it->second;
        copied = t.end;
      }
    }
    prev = tok;
  }
  out.append(text.substr(copied));
  return out;
}

}  // namespace

std::string_view ToString(FuseMode mode) {
  switch (mode) {
    case FuseMode::kFusion:
      return "fusion";
    case FuseMode::kConcat:
      return "concat";
    case FuseMode::kSuiteReplay:
      return "suite-replay";
  }
  return "?";
}

std::optional<FuseMode> ParseFuseMode(std::string_view text) {
  for (FuseMode m :
       {FuseMode::kFusion, FuseMode::kConcat, FuseMode::kSuiteReplay}) {
    if (ToString(m) == text) return m;
  }
  return std::nullopt;
}

FusionSide PlanSide(std::span<const DataflowChain> chains, double p,
                    Rng& rng) {
  FusionSide side;
  side.chain = SelectChain(chains, rng);
  const DataflowChain& chain = chains[side.chain];
  side.active = true;
  side.chain_variables = chain.variables;
  side.variable = chain.variables[rng.Uniform(chain.variables.size())];
  const std::vector<Site>& sites = chain.sites.at(side.variable);
  for (const Site& site : sites) {
    if (rng.Bernoulli(p)) side.sites.push_back(site);
  }
  if (side.sites.empty() && !sites.empty()) {
    side.forced = true;
    side.sites.push_back(sites[rng.Uniform(sites.size())]);
  }
  return side;
}

std::string FreshVariableName(std::string_view base,
                              std::span<const std::string_view> texts) {
  for (std::size_t n = 0;; ++n) {
    std::string name(base);
    if (n > 0) name += std::to_string(n);
    bool taken = IsReservedVariable(name);
    for (std::string_view text : texts) {
      taken = taken || MentionsVariable(text, name);
    }
    if (!taken) return name;
  }
}

FusionPlan PlanFusion(const Program& a, std::span<const DataflowChain> chains_a,
                      const Program& b, std::span<const DataflowChain> chains_b,
                      double p, std::string_view shared_base, Rng& rng) {
  if (chains_a.empty() || chains_b.empty()) {
    throw Error(ErrorCode::kNoChains,
                chains_a.empty() ? "first seed has no chain"
                                 : "second seed has no chain");
  }
  FusionPlan plan;
  plan.p = p;
  const std::string text_a = a.Reassemble();
  const std::string text_b = b.Reassemble();
  const std::string_view texts[] = {text_a, text_b};
  plan.shared_name = FreshVariableName(shared_base, texts);
  plan.a = PlanSide(chains_a, p, rng);
  plan.b = PlanSide(chains_b, p, rng);
  return plan;
}

std::string ApplyFusion(const Program& a, const Program& b,
                        const FusionPlan& plan) {
  std::string out = a.preamble.empty() ? std::string("<?php\n") : a.preamble;
  std::string code;
  for (std::string& text : RewriteSide(a, plan.a, plan.shared_name)) {
    code += text;
  }
  TerminateStatement(code);
  out += code;
  out += StripCloseTag(a.postamble);
  if (out.back() != '\n') out.push_back('\n');
  for (std::string& text : RewriteSide(b, plan.b, plan.shared_name)) {
    out += text;
  }
  out += b.postamble;
  return out;
}

Program PrepareSecond(const Program& a, const Program& b,
                      std::vector<Rename>* renames) {
  std::set<std::string> taken;
  for (const Statement& s : a.statements) {
    for (const std::string& name : DeclaredNames(s.text)) {
      taken.insert(Lower(name));
    }
  }
  std::set<std::string> b_names;
  for (const Statement& s : b.statements) {
    for (const std::string& name : DeclaredNames(s.text)) {
      b_names.insert(Lower(name));
    }
  }
  std::map<std::string, std::string> map;
  for (const Statement& s : b.statements) {
    for (const std::string& name : DeclaredNames(s.text)) {
      if (!taken.count(Lower(name)) || map.count(Lower(name))) continue;
      std::string fresh = name + "_b";
      for (int n = 2; taken.count(Lower(fresh)) || b_names.count(Lower(fresh));
           ++n) {
        fresh = name + "_b" + std::to_string(n);
      }
      map[Lower(name)] = fresh;
      if (renames) renames->push_back({name, fresh});
    }
  }

  Program out;
  out.preamble = b.preamble;
  out.postamble = b.postamble;
  out.unterminated = b.unterminated;
  for (const Statement& s : b.statements) {
    std::string text = map.empty() ? s.text : RenameIdentifiers(s.text, map);
    const std::string_view trimmed = Trim(text);
    if (trimmed.substr(0, 7) == "declare" &&
        Lower(trimmed).find("strict_types") != std::string::npos) {
      // Only legal as the very first statement of a file.
      const std::size_t at = text.find(trimmed);
      text = text.substr(0, at) + "/* " + std::string(trimmed) + " */";
    }
    out.statements.push_back(MakeStatement(s.index, std::move(text)));
  }
  return out;
}

std::string Provenance::ToHeader() const {
  std::string out = std::string(kProvenanceMarker) + "\n";
  auto line = [&](std::string_view key, const std::string& value) {
    out += " * " + std::string(key) + "=" + value + "\n";
  };
  line("mode", std::string(ToString(mode)));
  line("rng_seed", std::to_string(rng_seed));
  line("seed_a", seed_a + " " + seed_a_path);
  if (mode != FuseMode::kSuiteReplay) line("seed_b", seed_b + " " + seed_b_path);
  line("shared", plan.shared_name);
  for (const FusionSide* side : {&plan.a, &plan.b}) {
    const char* key = side == &plan.a ? "chain_a" : "chain_b";
    if (!side->active) {
      line(key, "none");
      continue;
    }
    std::string v = "$" + side->variable + " sites=";
    for (std::size_t i = 0; i < side->sites.size(); ++i) {
      if (i) v += ",";
      v += std::to_string(side->sites[i].statement) + ":" +
           std::to_string(side->sites[i].range.begin);
    }
    if (side->forced) v += " forced";
    line(key, v);
  }
  line("mutations", std::to_string(mutations_a.size()) + "+" +
                        std::to_string(mutations_b.size()));
  if (fallback) line("fallback", fallback_reason);
  for (const Rename& r : renames) line("rename", r.from + "->" + r.to);
  for (const auto& [key, value] : injected_ini) line("ini", key + "=" + value);
  // A `*/` inside a value would end the comment early.
  std::string::size_type pos;
  while ((pos = out.find("*/")) != std::string::npos) out.replace(pos, 2, "* /");
  out += " */";
  return out;
}

std::string StripProvenanceHeader(std::string_view body) {
  const std::size_t begin = body.find(kProvenanceMarker);
  if (begin == std::string_view::npos) return std::string(body);
  const std::size_t close = body.find("*/", begin + kProvenanceMarker.size());
  if (close == std::string_view::npos) return std::string(body);
  std::size_t lo = begin;
  std::size_t hi = close + 2;
  if (hi < body.size() && body[hi] == '\n') {
    ++hi;
  } else if (lo > 0 && body[lo - 1] == '\n') {
    --lo;
  }
  std::string out(body.substr(0, lo));
  out.append(body.substr(hi));
  return out;
}

namespace {

std::string InsertHeader(const std::string& body, const std::string& header) {
  const Program program = Segment(body);
  std::string out = program.preamble;
  if (!out.empty() && out.back() == '\n') {
    out += header + "\n";
  } else {
    out += "\n" + header;
  }
  out.append(body, program.preamble.size());
  return out;
}

std::vector<DataflowChain> ChainsOf(const Program& program) {
  if (program.statements.empty()) return {};
  return FindChains(ComputeFlowSets(program), program);
}

}  // namespace

FusedTest Fuse(const TestCase& a, const TestCase& b, const FuseConfig& config,
               uint64_t seed) {
  Rng rng(seed);
  FusedTest fused;
  Provenance& prov = fused.provenance;
  prov.rng_seed = seed;
  prov.mode = config.mode;
  prov.seed_a = a.Id();
  prov.seed_a_path = a.source_path();
  prov.plan.shared_name = config.shared_name;
  prov.plan.p = config.p;
  if (config.mode == FuseMode::kSuiteReplay) {
    fused.test = a;
    return fused;
  }
  prov.seed_b = b.Id();
  prov.seed_b_path = b.source_path();

  MutationResult ma =
      MutateProgram(Segment(a.Body("FILE")), config.mutation_rate, rng);
  MutationResult mb =
      MutateProgram(Segment(b.Body("FILE")), config.mutation_rate, rng);
  prov.mutations_a = std::move(ma.events);
  prov.mutations_b = std::move(mb.events);
  const Program& pa = ma.program;
  const Program pb = PrepareSecond(pa, mb.program, &prov.renames);

  if (config.mode == FuseMode::kFusion) {
    const std::vector<DataflowChain> chains_a = ChainsOf(pa);
    const std::vector<DataflowChain> chains_b = ChainsOf(pb);
    if (chains_a.empty() || chains_b.empty()) {
      prov.fallback = true;
      prov.fallback_reason =
          chains_a.empty() ? "no chain in seed a" : "no chain in seed b";
    } else {
      prov.plan = PlanFusion(pa, chains_a, pb, chains_b, config.p,
                             config.shared_name, rng);
    }
  }
  std::string body = ApplyFusion(pa, pb, prov.plan);

  const HarnessTemplate harness =
      MakeHarnessTemplate(config.max_calls, rng.Next());
  prov.harness_seed = harness.rng_seed;
  if (config.interface_fuzzing) body = InjectInterfaceFuzzing(body, harness);

  static const IniDictionary kEmpty;
  const EnvPlan env = CrossoverEnv(
      a, b, config.dictionary ? *config.dictionary : kEmpty, config.k,
      config.q, rng);
  prov.injected_ini = env.injected_ini;

  body = InsertHeader(body, prov.ToHeader());
  fused.test = MergeSections(a, b, std::move(body), env);
  return fused;
}

}  // namespace fusefuzz
