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

#include "fusefuzz/mutate.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <tuple>

#include "fusefuzz/error.h"

namespace fusefuzz {

std::string_view ToString(MutationKind kind) {
  switch (kind) {
    case MutationKind::kArithmetic: return "arithmetic";
    case MutationKind::kAssignment: return "assignment";
    case MutationKind::kLogical: return "logical";
    case MutationKind::kInteger: return "integer";
    case MutationKind::kString: return "string";
    case MutationKind::kVariable: return "variable";
  }
  return "arithmetic";
}

namespace {

constexpr std::array<std::string_view, 6> kArithmetic = {"+", "-", "*",
                                                          "/", "%", "**"};
constexpr std::array<std::string_view, 6> kAssignment = {"=",  "+=", "-=",
                                                          "*=", "/=", ".="};
constexpr std::array<std::string_view, 5> kLogical = {"and", "or", "xor",
                                                       "&&", "||"};
// 64-bit extremes; the minimum has no direct literal form.
constexpr std::array<std::string_view, 5> kIntegers = {
    "0", "1", "-1", "9223372036854775807", "(-9223372036854775807-1)"};
constexpr std::array<std::string_view, 2> kStrings = {"''", "null"};

// Keywords after which an operator is unary.
bool IsPrefixKeyword(std::string_view lower) {
  static constexpr std::array<std::string_view, 16> kKeywords = {
      "return", "echo",  "print",   "case",    "and",     "or",
      "xor",    "yield", "throw",   "include", "require", "include_once",
      "require_once", "else", "new", "clone"};
  return std::find(kKeywords.begin(), kKeywords.end(), lower) !=
         kKeywords.end();
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

template <std::size_t N>
std::vector<std::string> PoolWithout(const std::array<std::string_view, N>& all,
                                     std::string_view before) {
  std::vector<std::string> pool;
  for (std::string_view s : all) {
    if (s != before) pool.emplace_back(s);
  }
  return pool;
}

bool IsDecimalInteger(std::string_view s) {
  if (s.empty()) return false;
  if (s.size() > 1 && s[0] == '0') return false;  // octal
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool IsOperatorChar(char c) {
  return std::string_view("+-*/%.=<>!&|^?:#~").find(c) !=
         std::string_view::npos;
}

struct Sig {
  Token token;
  std::string_view text;
};

void CollectStatementSites(const Statement& stmt,
                           const std::set<std::string>& defined_before,
                           std::vector<MutationSite>& sites) {
  if (stmt.kind == StatementKind::kDeclaration) return;
  std::vector<Sig> sig;
  for (const Token& t : Tokenize(stmt.text)) {
    if (IsTrivia(t) || t.kind == TokenKind::kCloseTag) continue;
    sig.push_back({t, TokenText(stmt.text, t)});
  }
  if (sig.empty()) return;
  const std::string head = Lower(sig[0].text);
  if (head == "declare" || head == "static" || head == "global" ||
      head == "use" || head == "namespace") {
    return;
  }

  auto value_end = [&](std::size_t k) {
    const Sig& s = sig[k];
    switch (s.token.kind) {
      case TokenKind::kVariable:
      case TokenKind::kNumber:
      case TokenKind::kString:
      case TokenKind::kHeredoc:
        return true;
      case TokenKind::kIdentifier:
        return !IsPrefixKeyword(Lower(s.text));
      default:
        return s.text == ")" || s.text == "]";
    }
  };

  // Brackets: kind of token preceding each open '['.
  std::vector<std::size_t> open_brackets;
  std::vector<bool> index_bracket_closes(sig.size(), false);
  int paren_depth = 0;
  std::vector<int> depth_at(sig.size(), 0);
  for (std::size_t k = 0; k < sig.size(); ++k) {
    const std::string_view t = sig[k].text;
    if (sig[k].token.kind == TokenKind::kPunct) {
      if (t == "(" || t == "[") ++paren_depth;
      if (t == ")" || t == "]") paren_depth = std::max(0, paren_depth - 1);
      if (t == "[") open_brackets.push_back(k);
      if (t == "]" && !open_brackets.empty()) {
        const std::size_t open = open_brackets.back();
        open_brackets.pop_back();
        index_bracket_closes[k] = open > 0 && value_end(open - 1);
      }
    }
    depth_at[k] = paren_depth;
  }

  // Variables a use may be swapped with.
  std::vector<std::string> var_pool(defined_before.begin(),
                                    defined_before.end());
  std::set<std::pair<std::size_t, std::size_t>> use_ranges;
  for (const VarOccurrence& occ : stmt.occurrences) {
    if (occ.role == Role::kUse && !occ.local && !occ.reserved) {
      use_ranges.insert({occ.range.begin, occ.range.end});
    }
  }

  for (std::size_t k = 0; k < sig.size(); ++k) {
    const Sig& s = sig[k];
    const ByteRange range{s.token.begin, s.token.end};
    auto add = [&](MutationKind kind, std::vector<std::string> pool) {
      if (pool.empty()) return;
      sites.push_back({kind, stmt.index, range, std::string(s.text),
                       std::move(pool)});
    };
    switch (s.token.kind) {
      case TokenKind::kOperator: {
        const bool prev_value = k > 0 && value_end(k - 1);
        if (std::find(kArithmetic.begin(), kArithmetic.end(), s.text) !=
                kArithmetic.end() &&
            prev_value && k + 1 < sig.size()) {
          add(MutationKind::kArithmetic, PoolWithout(kArithmetic, s.text));
        } else if (std::find(kAssignment.begin(), kAssignment.end(),
                             s.text) != kAssignment.end() &&
                   k > 0 && depth_at[k] == 0 &&
                   (sig[k - 1].token.kind == TokenKind::kVariable ||
                    index_bracket_closes[k - 1]) &&
                   !(k + 1 < sig.size() && sig[k + 1].text == "&")) {
          add(MutationKind::kAssignment, PoolWithout(kAssignment, s.text));
        } else if (s.text == "&&" || s.text == "||") {
          add(MutationKind::kLogical, PoolWithout(kLogical, s.text));
        }
        break;
      }
      case TokenKind::kIdentifier: {
        const std::string lower = Lower(s.text);
        if ((lower == "and" || lower == "or" || lower == "xor") && k > 0) {
          add(MutationKind::kLogical, PoolWithout(kLogical, lower));
        }
        break;
      }
      case TokenKind::kNumber:
        if (IsDecimalInteger(s.text)) {
          add(MutationKind::kInteger, PoolWithout(kIntegers, s.text));
        }
        break;
      case TokenKind::kString:
        if (s.text.front() != '`') {
          const bool empty = s.text == "''" || s.text == "\"\"";
          add(MutationKind::kString,
              PoolWithout(kStrings, empty ? "''" : std::string_view()));
        }
        break;
      case TokenKind::kVariable:
        if (use_ranges.count({range.begin, range.end})) {
          std::vector<std::string> pool;
          for (const std::string& v : var_pool) {
            if ("$" + v != s.text) pool.push_back("$" + v);
          }
          add(MutationKind::kVariable, std::move(pool));
        }
        break;
      default:
        break;
    }
  }
}

// Inserts spaces so the replacement cannot fuse with neighbouring operator
// characters into a different token (`- -1`, not `--1`).
std::string Padded(std::string_view text, const ByteRange& range,
                   std::string_view replacement) {
  std::string out(replacement);
  if (range.begin > 0 && !out.empty() && IsOperatorChar(text[range.begin - 1]) &&
      IsOperatorChar(out.front())) {
    out.insert(out.begin(), ' ');
  }
  if (range.end < text.size() && !out.empty() &&
      IsOperatorChar(text[range.end]) && IsOperatorChar(out.back())) {
    out.push_back(' ');
  }
  // Word operators need separation from identifiers.
  auto word = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '$' || static_cast<unsigned char>(c) >= 0x80;
  };
  if (range.begin > 0 && word(text[range.begin - 1]) && word(out.front())) {
    out.insert(out.begin(), ' ');
  }
  if (range.end < text.size() && word(text[range.end]) && word(out.back())) {
    out.push_back(' ');
  }
  return out;
}

}  // namespace

std::vector<MutationSite> FindMutationSites(const Program& program) {
  std::vector<MutationSite> sites;
  std::set<std::string> defined_before;
  for (const Statement& stmt : program.statements) {
    CollectStatementSites(stmt, defined_before, sites);
    for (const VarOccurrence& occ : stmt.occurrences) {
      if (occ.IsDef() && !occ.local && !occ.reserved) {
        defined_before.insert(occ.name);
      }
    }
  }
  std::stable_sort(sites.begin(), sites.end(), [](const auto& a, const auto& b) {
    return std::tie(a.statement, a.range.begin) <
           std::tie(b.statement, b.range.begin);
  });
  return sites;
}

MutationResult MutateProgram(const Program& program, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mutation rate outside [0, 1]");
  }
  MutationResult result;
  if (rate == 0.0) {
    result.program = program;
    return result;
  }
  for (const MutationSite& site : FindMutationSites(program)) {
    if (!rng.Bernoulli(rate)) continue;
    const std::string& after = site.pool[rng.Uniform(site.pool.size())];
    result.events.push_back(
        {site.kind, site.statement, site.range, site.before, after, {}});
  }
  if (result.events.empty()) {
    result.program = program;
    return result;
  }

  std::vector<std::string> texts;
  for (const Statement& s : program.statements) texts.push_back(s.text);
  // Events are in site order; apply right to left so earlier ranges stay
  // valid, then locate each replacement in the new body.
  std::vector<std::size_t> lengths(result.events.size());
  for (std::size_t k = result.events.size(); k-- > 0;) {
    const MutationEvent& e = result.events[k];
    std::string& text = texts[e.statement];
    const std::string replacement = Padded(text, e.range, e.after);
    text.replace(e.range.begin, e.range.size(), replacement);
    lengths[k] = replacement.size();
  }
  std::vector<std::size_t> base(texts.size());
  std::size_t offset = program.preamble.size();
  for (std::size_t i = 0; i < texts.size(); ++i) {
    base[i] = offset;
    offset += texts[i].size();
  }
  std::size_t delta = 0;
  for (std::size_t k = 0; k < result.events.size(); ++k) {
    MutationEvent& e = result.events[k];
    if (k == 0 || result.events[k - 1].statement != e.statement) delta = 0;
    const std::size_t begin = base[e.statement] + e.range.begin + delta;
    e.output = {begin, begin + lengths[k]};
    delta += lengths[k] - e.range.size();
  }
  std::string body = program.preamble;
  for (const std::string& t : texts) body += t;
  body += program.postamble;
  result.program = Segment(body);
  return result;
}

}  // namespace fusefuzz
