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

#include "fusefuzz/phpparse.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

#include "spdlog/spdlog.h"

namespace fusefuzz {

namespace {

bool IsIdentStart(unsigned char c) {
  return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool IsIdentChar(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

constexpr std::array<std::string_view, 9> kOps3 = {
    "<=>", "===", "!==", "**=", "...", "<<=", ">>=", "?\?=", "?->"};
constexpr std::array<std::string_view, 25> kOps2 = {
    "**", "++", "--", "->", "=>", "::", "==", "!=", "<>",
    "<=", ">=", "&&", "||", "??", "+=", "-=", "*=", "/=",
    ".=", "%=", "&=", "|=", "^=", "<<", ">>"};
constexpr std::string_view kOps1 = "+-*/%=<>!&|^~?:.@";

// Scans a quoted literal starting at `pos` (the opening quote).
std::size_t ScanQuoted(std::string_view src, std::size_t pos, bool* closed) {
  const char quote = src[pos];
  std::size_t i = pos + 1;
  while (i < src.size()) {
    if (src[i] == '\\') {
      i += 2;
      continue;
    }
    if (src[i] == quote) {
      *closed = true;
      return i + 1;
    }
    ++i;
  }
  *closed = false;
  return src.size();
}

// Heredoc/nowdoc starting at `pos` ("<<<"). Returns nullopt when the text
// is not a heredoc opener.
std::optional<std::size_t> ScanHeredoc(std::string_view src, std::size_t pos,
                                       bool* closed) {
  std::size_t i = pos + 3;
  while (i < src.size() && (src[i] == ' ' || src[i] == '\t')) ++i;
  char quote = 0;
  if (i < src.size() && (src[i] == '\'' || src[i] == '"')) quote = src[i++];
  const std::size_t label_begin = i;
  if (i >= src.size() || !IsIdentStart(src[i])) return std::nullopt;
  while (i < src.size() && IsIdentChar(src[i])) ++i;
  const std::string_view label = src.substr(label_begin, i - label_begin);
  if (quote) {
    if (i >= src.size() || src[i] != quote) return std::nullopt;
    ++i;
  }
  if (i < src.size() && src[i] == '\r') ++i;
  if (i >= src.size() || src[i] != '\n') return std::nullopt;
  ++i;
  // The closing label may be indented and is followed by a non-identifier.
  while (i < src.size()) {
    std::size_t j = i;
    while (j < src.size() && (src[j] == ' ' || src[j] == '\t')) ++j;
    if (src.substr(j, label.size()) == label &&
        (j + label.size() == src.size() ||
         !IsIdentChar(src[j + label.size()]))) {
      *closed = true;
      return j + label.size();
    }
    const std::size_t nl = src.find('\n', i);
    if (nl == std::string_view::npos) break;
    i = nl + 1;
  }
  *closed = false;
  return src.size();
}

std::size_t ScanNumber(std::string_view src, std::size_t i) {
  const std::size_t n = src.size();
  if (src[i] == '0' && i + 1 < n &&
      std::string_view("xXbBoO").find(src[i + 1]) != std::string_view::npos) {
    i += 2;
    while (i < n && (std::isxdigit(static_cast<unsigned char>(src[i])) ||
                     src[i] == '_')) {
      ++i;
    }
    return i;
  }
  auto digits = [&] {
    while (i < n && (std::isdigit(static_cast<unsigned char>(src[i])) ||
                     src[i] == '_')) {
      ++i;
    }
  };
  digits();
  if (i < n && src[i] == '.' &&
      !(i + 1 < n && (src[i + 1] == '.' || src[i + 1] == '='))) {
    ++i;
    digits();
  }
  if (i < n && (src[i] == 'e' || src[i] == 'E')) {
    std::size_t j = i + 1;
    if (j < n && (src[j] == '+' || src[j] == '-')) ++j;
    if (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) {
      i = j;
      digits();
    }
  }
  return i;
}

}  // namespace

bool IsAssignmentOperator(std::string_view op) {
  static constexpr std::array<std::string_view, 14> kAssign = {
      "=",  "+=", "-=", "*=", "/=",  ".=",  "%=",
      "**=", "?\?=", "&=", "|=", "^=", "<<=", ">>="};
  return std::find(kAssign.begin(), kAssign.end(), op) != kAssign.end();
}

std::vector<Token> Tokenize(std::string_view src, std::size_t from) {
  std::vector<Token> tokens;
  std::size_t i = from;
  const std::size_t n = src.size();
  auto push = [&](TokenKind kind, std::size_t end, bool unterminated = false) {
    tokens.push_back({kind, i, end, unterminated});
    i = end;
  };
  while (i < n) {
    const char c = src[i];
    const char next = i + 1 < n ? src[i + 1] : '\0';
    if (IsSpace(c)) {
      std::size_t j = i;
      while (j < n && IsSpace(src[j])) ++j;
      push(TokenKind::kWhitespace, j);
    } else if (c == '?' && next == '>') {
      push(TokenKind::kCloseTag, i + 2);
      break;
    } else if (c == '#' && next == '[') {
      push(TokenKind::kPunct, i + 2);
    } else if (c == '#' || (c == '/' && next == '/')) {
      std::size_t j = i;
      while (j < n && src[j] != '\n' &&
             !(src[j] == '?' && j + 1 < n && src[j + 1] == '>')) {
        ++j;
      }
      push(TokenKind::kComment, j);
    } else if (c == '/' && next == '*') {
      const std::size_t close = src.find("*/", i + 2);
      if (close == std::string_view::npos) {
        push(TokenKind::kComment, n, true);
      } else {
        push(TokenKind::kComment, close + 2);
      }
    } else if (c == '$' && i + 1 < n && IsIdentStart(next)) {
      std::size_t j = i + 1;
      while (j < n && IsIdentChar(src[j])) ++j;
      push(TokenKind::kVariable, j);
    } else if (IsIdentStart(c) ||
               (c == '\\' && i + 1 < n && IsIdentStart(next))) {
      std::size_t j = i;
      while (j < n && (IsIdentChar(src[j]) ||
                       (src[j] == '\\' && j + 1 < n &&
                        IsIdentStart(src[j + 1])))) {
        ++j;
      }
      push(TokenKind::kIdentifier, j);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && std::isdigit(static_cast<unsigned char>(next)))) {
      push(TokenKind::kNumber, ScanNumber(src, i));
    } else if (c == '\'' || c == '"' || c == '`') {
      bool closed = false;
      const std::size_t end = ScanQuoted(src, i, &closed);
      push(TokenKind::kString, end, !closed);
    } else if (src.substr(i, 3) == "<<<") {
      bool closed = false;
      if (auto end = ScanHeredoc(src, i, &closed)) {
        push(TokenKind::kHeredoc, *end, !closed);
      } else {
        push(TokenKind::kOperator, i + 2);  // "<<" then "<"
      }
    } else if (std::string_view(";,()[]{}$").find(c) != std::string_view::npos) {
      push(TokenKind::kPunct, i + 1);
    } else {
      std::size_t len = 0;
      for (std::string_view op : kOps3) {
        if (src.substr(i, 3) == op) len = 3;
      }
      if (!len) {
        for (std::string_view op : kOps2) {
          if (src.substr(i, 2) == op) len = 2;
        }
      }
      if (!len && kOps1.find(c) != std::string_view::npos) len = 1;
      if (len) {
        push(TokenKind::kOperator, i + len);
      } else {
        push(TokenKind::kPunct, i + 1);
      }
    }
  }
  return tokens;
}

std::string_view ToString(StatementKind kind) {
  switch (kind) {
    case StatementKind::kAssignment: return "assignment";
    case StatementKind::kExpression: return "expression";
    case StatementKind::kControlHeader: return "control-header";
    case StatementKind::kBlockDelimiter: return "block-delimiter";
    case StatementKind::kDeclaration: return "declaration";
    case StatementKind::kOther: return "other";
  }
  return "other";
}

std::string_view ToString(Role role) {
  switch (role) {
    case Role::kUse: return "use";
    case Role::kDef: return "def";
    case Role::kModify: return "modify";
  }
  return "use";
}

bool IsReservedVariable(std::string_view name) {
  static constexpr std::array<std::string_view, 10> kReserved = {
      "GLOBALS", "_SERVER", "_GET",     "_POST", "_FILES",
      "_COOKIE", "_SESSION", "_REQUEST", "_ENV",  "this"};
  return std::find(kReserved.begin(), kReserved.end(), name) !=
         kReserved.end();
}

namespace {

// Significant (non-trivia) tokens of one statement with helpers.
class SigTokens {
 public:
  explicit SigTokens(std::string_view src) : src_(src) {
    for (const Token& t : Tokenize(src)) {
      if (!IsTrivia(t) && t.kind != TokenKind::kCloseTag) tokens_.push_back(t);
    }
  }

  std::size_t size() const { return tokens_.size(); }
  const Token& operator[](std::size_t k) const { return tokens_[k]; }
  std::string_view text(std::size_t k) const {
    return k < tokens_.size() ? TokenText(src_, tokens_[k]) : std::string_view();
  }
  bool Is(std::size_t k, std::string_view s) const {
    return k < tokens_.size() && text(k) == s;
  }
  bool IsKeyword(std::size_t k, std::string_view kw) const {
    return k < tokens_.size() && tokens_[k].kind == TokenKind::kIdentifier &&
           Lower(text(k)) == kw;
  }

  // Index of the bracket closing the one at `open`, or size() if unbalanced.
  std::size_t MatchClose(std::size_t open) const {
    int depth = 0;
    for (std::size_t k = open; k < tokens_.size(); ++k) {
      const std::string_view t = text(k);
      if (tokens_[k].kind != TokenKind::kPunct) continue;
      if (t == "(" || t == "[" || t == "{" || t == "#[") {
        ++depth;
      } else if (t == ")" || t == "]" || t == "}") {
        if (--depth == 0) return k;
      }
    }
    return tokens_.size();
  }

  // First index after any leading attribute groups.
  std::size_t Head() const {
    std::size_t k = 0;
    while (Is(k, "#[")) k = MatchClose(k) + 1;
    return k;
  }

 private:
  std::string_view src_;
  std::vector<Token> tokens_;
};

bool IsValueEnd(const SigTokens& sig, std::size_t k) {
  const Token& t = sig[k];
  if (t.kind == TokenKind::kVariable || t.kind == TokenKind::kNumber ||
      t.kind == TokenKind::kString || t.kind == TokenKind::kHeredoc) {
    return true;
  }
  if (t.kind == TokenKind::kIdentifier) return true;
  const std::string_view s = sig.text(k);
  return s == ")" || s == "]" || s == "}";
}

bool IsDeclarationHead(const SigTokens& sig, std::size_t h) {
  const std::string head = Lower(sig.text(h));
  if (sig[h].kind != TokenKind::kIdentifier) return false;
  if (head == "function") {
    return h + 1 < sig.size() &&
           (sig[h + 1].kind == TokenKind::kIdentifier || sig.Is(h + 1, "&"));
  }
  if (head == "class" || head == "interface" || head == "trait" ||
      head == "enum") {
    return h + 1 < sig.size() && sig[h + 1].kind == TokenKind::kIdentifier;
  }
  return head == "abstract" || head == "final" || head == "readonly" ||
         head == "namespace" || head == "use" || head == "const";
}

bool IsControlKeyword(std::string_view lower) {
  return lower == "if" || lower == "foreach" || lower == "for" ||
         lower == "while" || lower == "switch" || lower == "try" ||
         lower == "do";
}

// True when the statement opened by the head at `h` ends at its closing
// brace rather than a semicolon.
bool IsBlockHead(const std::vector<Token>& tokens, std::string_view src,
                 std::size_t h) {
  const std::string head = Lower(TokenText(src, tokens[h]));
  if (head == "{") return tokens[h].kind == TokenKind::kPunct;
  if (tokens[h].kind != TokenKind::kIdentifier) return false;
  if (IsControlKeyword(head) || head == "declare" || head == "namespace" ||
      head == "abstract" || head == "final" || head == "readonly") {
    return true;
  }
  std::size_t k = h + 1;
  while (k < tokens.size() && IsTrivia(tokens[k])) ++k;
  if (k >= tokens.size()) return false;
  if (head == "function") {
    return tokens[k].kind == TokenKind::kIdentifier ||
           TokenText(src, tokens[k]) == "&";
  }
  if (head == "class" || head == "interface" || head == "trait" ||
      head == "enum") {
    return tokens[k].kind == TokenKind::kIdentifier;
  }
  return false;
}

bool IsContinuationKeyword(std::string_view lower) {
  return lower == "else" || lower == "elseif" || lower == "catch" ||
         lower == "finally";
}

// Keywords that look like calls but are language constructs.
bool IsNonCallKeyword(std::string_view lower) {
  static constexpr std::array<std::string_view, 16> kKeywords = {
      "array", "list",  "isset",  "empty",    "unset", "if",
      "elseif", "while", "for",   "foreach",  "switch", "match",
      "fn",    "function", "use", "catch"};
  return std::find(kKeywords.begin(), kKeywords.end(), lower) !=
         kKeywords.end();
}

// True when tokens (from, to) contain a call whose argument list includes a
// variable.
bool ContainsCallWithVariableArgs(const SigTokens& sig, std::size_t from,
                                  std::size_t to) {
  for (std::size_t k = from; k < to && k < sig.size(); ++k) {
    if (!sig.Is(k, "(") || k == 0) continue;
    const Token& prev = sig[k - 1];
    const bool callee =
        (prev.kind == TokenKind::kIdentifier &&
         !IsNonCallKeyword(Lower(sig.text(k - 1)))) ||
        prev.kind == TokenKind::kVariable || sig.Is(k - 1, ")") ||
        sig.Is(k - 1, "]");
    if (!callee) continue;
    const std::size_t close = sig.MatchClose(k);
    for (std::size_t j = k + 1; j < close; ++j) {
      if (sig[j].kind == TokenKind::kVariable) return true;
    }
  }
  return false;
}

// End of the expression starting at `from`: the first `;` or `,` at
// relative depth zero, or a closing bracket that leaves it.
std::size_t ExpressionEnd(const SigTokens& sig, std::size_t from) {
  int depth = 0;
  for (std::size_t k = from; k < sig.size(); ++k) {
    if (sig[k].kind != TokenKind::kPunct) continue;
    const std::string_view t = sig.text(k);
    if (t == "(" || t == "[" || t == "{" || t == "#[") {
      ++depth;
    } else if (t == ")" || t == "]" || t == "}") {
      if (--depth < 0) return k;
    } else if ((t == ";" || t == ",") && depth == 0) {
      return k;
    }
  }
  return sig.size();
}

StatementKind Classify(const SigTokens& sig) {
  const std::size_t h = sig.Head();
  if (h >= sig.size()) return StatementKind::kOther;
  const std::string head = Lower(sig.text(h));
  if (IsDeclarationHead(sig, h)) return StatementKind::kDeclaration;
  if (sig[h].kind == TokenKind::kIdentifier && IsControlKeyword(head)) {
    return StatementKind::kControlHeader;
  }
  if (head == "{" || head == "}") return StatementKind::kBlockDelimiter;
  if (head == ";" || head == "return" || head == "global" || head == "goto" ||
      head == "break" || head == "continue" || head == "declare" ||
      (head == "static" && !sig.IsKeyword(h + 1, "function") &&
       !sig.IsKeyword(h + 1, "fn") && !sig.Is(h + 1, "::"))) {
    return StatementKind::kOther;
  }
  int depth = 0;
  for (std::size_t k = h; k < sig.size(); ++k) {
    const std::string_view t = sig.text(k);
    if (sig[k].kind == TokenKind::kPunct) {
      if (t == "(" || t == "[" || t == "{" || t == "#[") ++depth;
      if (t == ")" || t == "]" || t == "}") --depth;
    } else if (depth == 0 && sig[k].kind == TokenKind::kOperator &&
               IsAssignmentOperator(t)) {
      return StatementKind::kAssignment;
    }
  }
  return StatementKind::kExpression;
}

}  // namespace

StatementKind ClassifyStatement(std::string_view stmt_text) {
  return Classify(SigTokens(stmt_text));
}

std::vector<VarOccurrence> ExtractOccurrences(std::string_view stmt_text) {
  const SigTokens sig(stmt_text);
  const std::size_t n = sig.size();
  const bool all_local = Classify(sig) == StatementKind::kDeclaration;
  std::vector<bool> local(n, all_local);
  std::vector<bool> def_region(n, false);

  auto mark = [](std::vector<bool>& flags, std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to && k < flags.size(); ++k) flags[k] = true;
  };

  for (std::size_t k = 0; k < n; ++k) {
    if (sig[k].kind == TokenKind::kIdentifier) {
      const std::string kw = Lower(sig.text(k));
      if (kw == "function" && !all_local) {
        std::size_t p = k + 1;
        while (p < n && !sig.Is(p, "(")) {
          if (sig.Is(p, "{") || sig.Is(p, ";")) break;
          ++p;
        }
        if (!sig.Is(p, "(")) continue;
        const std::size_t close = sig.MatchClose(p);
        mark(local, p + 1, close);
        std::size_t q = close + 1;
        if (sig.IsKeyword(q, "use") && sig.Is(q + 1, "(")) {
          q = sig.MatchClose(q + 1) + 1;
        }
        while (q < n && !sig.Is(q, "{") && !sig.Is(q, ";")) ++q;
        if (sig.Is(q, "{")) mark(local, q + 1, sig.MatchClose(q));
      } else if (kw == "fn" && sig.Is(k + 1, "(") && !all_local) {
        mark(local, k + 2, sig.MatchClose(k + 1));
      } else if (kw == "foreach" && sig.Is(k + 1, "(")) {
        const std::size_t close = sig.MatchClose(k + 1);
        int depth = 0;
        for (std::size_t j = k + 2; j < close; ++j) {
          if (sig[j].kind == TokenKind::kPunct) {
            const std::string_view t = sig.text(j);
            if (t == "(" || t == "[" || t == "{") ++depth;
            if (t == ")" || t == "]" || t == "}") --depth;
          }
          if (depth == 0 && sig.IsKeyword(j, "as")) {
            mark(def_region, j + 1, close);
            break;
          }
        }
      } else if (kw == "list" && sig.Is(k + 1, "(")) {
        const std::size_t close = sig.MatchClose(k + 1);
        if (sig.Is(close + 1, "=")) mark(def_region, k + 2, close);
      }
    } else if (sig.Is(k, "[") && (k == 0 || !IsValueEnd(sig, k - 1))) {
      const std::size_t close = sig.MatchClose(k);
      if (sig.Is(close + 1, "=")) mark(def_region, k + 1, close);
    }
  }

  std::vector<VarOccurrence> out;
  for (std::size_t k = 0; k < n; ++k) {
    if (sig[k].kind != TokenKind::kVariable) continue;
    if (k > 0 && sig.Is(k - 1, "::")) continue;  // static property
    VarOccurrence occ;
    occ.name = std::string(sig.text(k).substr(1));
    occ.range = {sig[k].begin, sig[k].end};
    occ.local = local[k];
    occ.reserved = IsReservedVariable(occ.name);
    if (k > 0 && sig.Is(k - 1, "$")) {
      spdlog::debug("dynamic variable name ${}; target not modeled", occ.name);
      out.push_back(std::move(occ));
      continue;
    }
    if (def_region[k]) {
      occ.role = Role::kDef;
      out.push_back(std::move(occ));
      continue;
    }
    std::size_t j = k + 1;
    bool accessed = false;
    while (j < n) {
      if (sig.Is(j, "[")) {
        j = sig.MatchClose(j) + 1;
        accessed = true;
      } else if ((sig.Is(j, "->") || sig.Is(j, "?->") || sig.Is(j, "::")) &&
                 j + 1 < n) {
        j = sig.Is(j + 1, "{") ? sig.MatchClose(j + 1) + 1 : j + 2;
        accessed = true;
      } else {
        break;
      }
    }
    if (j < n && sig[j].kind == TokenKind::kOperator &&
        IsAssignmentOperator(sig.text(j))) {
      occ.role = accessed ? Role::kModify : Role::kDef;
      occ.call_result = ContainsCallWithVariableArgs(
          sig, j + 1, ExpressionEnd(sig, j + 1));
    } else if ((j < n && (sig.Is(j, "++") || sig.Is(j, "--"))) ||
               (k > 0 && (sig.Is(k - 1, "++") || sig.Is(k - 1, "--")))) {
      occ.role = Role::kModify;
    }
    out.push_back(std::move(occ));
  }
  return out;
}

std::vector<std::string> DeclaredNames(std::string_view stmt_text) {
  const SigTokens sig(stmt_text);
  std::vector<std::string> names;
  std::size_t k = sig.Head();
  while (k < sig.size() && (sig.IsKeyword(k, "abstract") ||
                            sig.IsKeyword(k, "final") ||
                            sig.IsKeyword(k, "readonly"))) {
    ++k;
  }
  if (sig.IsKeyword(k, "const")) {
    bool expect_name = true;
    int depth = 0;
    for (++k; k < sig.size(); ++k) {
      const std::string_view t = sig.text(k);
      if (t == "(" || t == "[" || t == "{") ++depth;
      if (t == ")" || t == "]" || t == "}") --depth;
      if (expect_name && sig[k].kind == TokenKind::kIdentifier) {
        names.emplace_back(t);
      }
      expect_name = depth == 0 && t == ",";
    }
    return names;
  }
  if (sig.IsKeyword(k, "function")) {
    ++k;
    if (sig.Is(k, "&")) ++k;
  } else if (sig.IsKeyword(k, "class") || sig.IsKeyword(k, "interface") ||
             sig.IsKeyword(k, "trait") || sig.IsKeyword(k, "enum")) {
    ++k;
  } else {
    return names;
  }
  if (k < sig.size() && sig[k].kind == TokenKind::kIdentifier) {
    names.emplace_back(sig.text(k));
  }
  return names;
}

Statement MakeStatement(std::size_t index, std::string text) {
  Statement s;
  s.index = index;
  s.kind = ClassifyStatement(text);
  s.occurrences = ExtractOccurrences(text);
  s.text = std::move(text);
  return s;
}

std::string Program::Reassemble() const {
  std::string out = preamble;
  for (const Statement& s : statements) out += s.text;
  out += postamble;
  return out;
}

namespace {

// Position just past an opening tag, or npos when the body has none.
std::size_t FindOpenTagEnd(std::string_view body) {
  for (std::size_t pos = body.find("<?"); pos != std::string_view::npos;
       pos = body.find("<?", pos + 2)) {
    if (body.substr(pos, 3) == "<?=") return pos + 3;
    if (pos + 5 <= body.size() && Lower(body.substr(pos + 2, 3)) == "php" &&
        (pos + 5 == body.size() || IsSpace(body[pos + 5]))) {
      return pos + 5;
    }
  }
  return std::string_view::npos;
}

}  // namespace

Program Segment(std::string_view body) {
  Program program;
  std::size_t script_begin = FindOpenTagEnd(body);
  if (script_begin == std::string_view::npos) script_begin = 0;
  program.preamble = std::string(body.substr(0, script_begin));

  const std::vector<Token> tokens = Tokenize(body, script_begin);
  std::vector<std::string> texts;
  std::size_t stmt_start = script_begin;
  std::optional<std::size_t> head;
  std::size_t last_sig_end = script_begin;
  bool block = false;
  bool is_do = false;
  int depth = 0;
  int attr_depth = -1;

  auto next_sig = [&](std::size_t i) -> std::optional<std::size_t> {
    for (std::size_t j = i + 1; j < tokens.size(); ++j) {
      if (tokens[j].kind == TokenKind::kCloseTag) return std::nullopt;
      if (!IsTrivia(tokens[j])) return j;
    }
    return std::nullopt;
  };
  auto emit = [&](std::size_t end) {
    texts.emplace_back(body.substr(stmt_start, end - stmt_start));
    stmt_start = end;
    head.reset();
    block = is_do = false;
    depth = 0;
    attr_depth = -1;
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.kind == TokenKind::kCloseTag) {
      break;
    }
    if (t.unterminated) {
      program.unterminated = true;
      spdlog::debug("unterminated literal at offset {}", t.begin);
      texts.emplace_back(body.substr(stmt_start));
      stmt_start = body.size();
      head.reset();
      break;
    }
    if (IsTrivia(t)) continue;
    const std::string_view text = TokenText(body, t);
    last_sig_end = t.end;
    if (!head && attr_depth < 0) {
      if (text == "#[") {
        attr_depth = depth;
        ++depth;
        continue;
      }
      head = i;
      block = IsBlockHead(tokens, body, i);
      is_do = Lower(text) == "do";
    }
    if (t.kind == TokenKind::kPunct) {
      if (text == "(" || text == "[" || text == "{" || text == "#[") {
        ++depth;
      } else if (text == ")" || text == "]" || text == "}") {
        depth = std::max(0, depth - 1);
        if (attr_depth >= 0 && depth == attr_depth && !head) {
          attr_depth = -1;
          continue;
        }
      }
    }
    if (!head) continue;
    bool end_here = false;
    if (t.kind == TokenKind::kPunct && depth == 0) {
      if (text == ";") end_here = true;
      if (text == "}" && ((block && !is_do) || *head == i)) end_here = true;
    }
    if (!end_here) continue;
    if (block) {
      if (auto nx = next_sig(i);
          nx && tokens[*nx].kind == TokenKind::kIdentifier &&
          IsContinuationKeyword(Lower(TokenText(body, tokens[*nx])))) {
        continue;
      }
    }
    emit(t.end);
  }
  if (head && stmt_start < last_sig_end) emit(last_sig_end);
  if (stmt_start < body.size()) {
    program.postamble = std::string(body.substr(stmt_start));
  }

  program.statements.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    program.statements.push_back(MakeStatement(i, std::move(texts[i])));
  }
  return program;
}

}  // namespace fusefuzz
