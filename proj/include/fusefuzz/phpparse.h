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

#ifndef FUSEFUZZ_PHPPARSE_H_
#define FUSEFUZZ_PHPPARSE_H_

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fusefuzz {

// Half-open byte interval [begin, end).
struct ByteRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  auto operator<=>(const ByteRange&) const = default;
};

enum class TokenKind {
  kWhitespace,
  kComment,
  kString,    // '...', "...", `...`
  kHeredoc,   // heredoc and nowdoc, including the closing label
  kVariable,  // $name
  kIdentifier,
  kNumber,
  kOperator,
  kPunct,     // ; , ( ) [ ] { } $ #[ and stray bytes
  kCloseTag,  // ?>
};

struct Token {
  TokenKind kind;
  std::size_t begin;
  std::size_t end;
  // Set on strings, heredocs and block comments that reach end of input.
  bool unterminated = false;
};

inline bool IsTrivia(const Token& t) {
  return t.kind == TokenKind::kWhitespace || t.kind == TokenKind::kComment;
}

// Lexes script-mode text from `from` onwards. Lexing stops after the first
// close tag, which is emitted as the last token.
std::vector<Token> Tokenize(std::string_view src, std::size_t from = 0);

inline std::string_view TokenText(std::string_view src, const Token& t) {
  return src.substr(t.begin, t.end - t.begin);
}

// Assignment operators, including compound forms.
bool IsAssignmentOperator(std::string_view op);

enum class Role {
  kUse,
  kDef,
  // Element or property write (`$a[0] = ...`, `$a->x = ...`, `$a++`):
  // both a use and a definition of the base variable.
  kModify,
};

struct VarOccurrence {
  std::string name;  // without the sigil
  ByteRange range;   // covers the sigil and name within the statement text
  Role role = Role::kUse;
  // Inside a function/class declaration or a closure's parameters/body.
  bool local = false;
  // Superglobals and $this; never part of a fusion chain.
  bool reserved = false;
  // A definition whose assigned value is a call taking variable arguments.
  bool call_result = false;

  bool IsDef() const { return role != Role::kUse; }
  bool IsUse() const { return role != Role::kDef; }
  bool operator==(const VarOccurrence&) const = default;
};

enum class StatementKind {
  kAssignment,
  kExpression,
  kControlHeader,
  kBlockDelimiter,
  kDeclaration,
  kOther,
};

std::string_view ToString(StatementKind kind);
std::string_view ToString(Role role);

struct Statement {
  std::size_t index = 0;
  // Raw slice of the body: leading trivia followed by the statement itself.
  std::string text;
  std::vector<VarOccurrence> occurrences;
  StatementKind kind = StatementKind::kOther;
};

// A FILE body split into top-level statements.
struct Program {
  std::string preamble;  // everything up to and including the opening tag
  std::vector<Statement> statements;
  std::string postamble;  // trailing trivia, closing tag and anything after
  // An unterminated string or comment swallowed the rest of the body into
  // the final statement.
  bool unterminated = false;

  std::string Reassemble() const;
};

// Splits a FILE body into statements. Semicolons and braces inside strings,
// heredocs and comments never split. Control structures and declarations
// stay whole, including their blocks.
Program Segment(std::string_view file_body);

StatementKind ClassifyStatement(std::string_view stmt_text);

std::vector<VarOccurrence> ExtractOccurrences(std::string_view stmt_text);

// Superglobals and `this`.
bool IsReservedVariable(std::string_view name);

// Builds a Statement (kind and occurrences) from raw text.
Statement MakeStatement(std::size_t index, std::string text);

// Names of functions, classes, interfaces, traits and enums declared by a
// top-level declaration statement.
std::vector<std::string> DeclaredNames(std::string_view stmt_text);

}  // namespace fusefuzz

#endif  // FUSEFUZZ_PHPPARSE_H_
