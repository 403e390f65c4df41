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

#include "fusefuzz/augment.h"

#include <algorithm>
#include <set>

#include "fusefuzz/error.h"
#include "fusefuzz/phpparse.h"

namespace fusefuzz {

namespace {

constexpr std::string_view kHarnessPrologue = R"php(
function __fusefuzz_log($msg) { @fwrite(STDERR, "[fusefuzz] " . $msg . "\n"); }
function __fusefuzz_candidates(array $exclude) {
    $names = get_defined_functions()['internal'];
    foreach (get_loaded_extensions() as $ext) {
        $funcs = @get_extension_funcs($ext);
        if (is_array($funcs)) { $names = array_merge($names, $funcs); }
    }
    $names = array_values(array_unique($names));
    $out = [];
    foreach ($names as $name) {
        $skip = false;
        foreach ($exclude as $prefix) {
            if (strncmp($name, $prefix, strlen($prefix)) === 0) { $skip = true; break; }
        }
        if (!$skip) { $out[] = $name; }
    }
    sort($out);
    return $out;
}
function __fusefuzz_matches($value, $type) {
    if ($type === null || $type === 'mixed') { return true; }
    switch ($type) {
        case 'int': return is_int($value);
        case 'float': return is_float($value) || is_int($value);
        case 'string': return is_string($value);
        case 'bool': return is_bool($value);
        case 'array': return is_array($value);
        case 'callable': return is_callable($value);
        case 'iterable': return is_iterable($value);
        case 'object': return is_object($value);
        default: return $value instanceof $type;
    }
}
function __fusefuzz_call(array $vars, int $seed, int $max_calls, array $exclude) {
    mt_srand($seed);
    $candidates = __fusefuzz_candidates($exclude);
    $fill = [null, 0, 1, '', []];
    $values = array_values($vars);
    for ($n = 0; $n < $max_calls && count($candidates) > 0; $n++) {
        $name = $candidates[mt_rand(0, count($candidates) - 1)];
        try {
            $rf = new ReflectionFunction($name);
            $args = [];
            $count = $rf->getNumberOfParameters();
            foreach ($rf->getParameters() as $i => $param) {
                $type = $param->getType();
                $type_name = $type instanceof ReflectionNamedType ? $type->getName() : null;
                $matches = [];
                foreach ($values as $v) {
                    if (__fusefuzz_matches($v, $type_name)) { $matches[] = $v; }
                }
                $args[] = $matches ? $matches[mt_rand(0, count($matches) - 1)] : $fill[$i % count($fill)];
            }
            __fusefuzz_log("call " . $name . "/" . $count);
            $name(...$args);
        } catch (\Throwable $e) {
            __fusefuzz_log("caught " . get_class($e) . " from " . $name);
        }
    }
}
)php";

std::string PhpSingleQuoted(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

// Offset just past the last significant token of `text`, or npos.
std::size_t LastSignificantEnd(std::string_view text, std::string_view* last) {
  std::size_t end = std::string_view::npos;
  for (const Token& t : Tokenize(text)) {
    if (IsTrivia(t) || t.kind == TokenKind::kCloseTag) continue;
    end = t.end;
    *last = TokenText(text, t);
  }
  return end;
}

std::string EnsureNewline(std::string s) {
  if (!s.empty() && s.back() != '\n') s.push_back('\n');
  return s;
}

bool IsExpectSection(std::string_view name) {
  return name.substr(0, 6) == "EXPECT";
}

}  // namespace

std::vector<std::string> DefaultExclusions() {
  return {"posix",   "pcntl",     "exec",     "system",      "shell_exec",
          "passthru", "proc_",    "popen",    "unlink",      "rmdir",
          "sleep",   "usleep",    "time_nanosleep", "time_sleep_until",
          "readline", "mail",     "exit",     "set_time_limit", "ignore_user_abort"};
}

HarnessTemplate MakeHarnessTemplate(std::size_t max_calls, uint64_t rng_seed,
                                    std::vector<std::string> exclusions) {
  if (std::find(exclusions.begin(), exclusions.end(), "posix") ==
      exclusions.end()) {
    exclusions.insert(exclusions.begin(), "posix");
  }
  HarnessTemplate t;
  t.max_calls = max_calls;
  t.rng_seed = rng_seed;
  t.exclusions = std::move(exclusions);
  t.prologue = std::string(kPrologueMarker) + "\n";
  t.epilogue = std::string(kEpilogueMarker) + "\n";
  if (max_calls == 0) return t;

  t.prologue += std::string(kHarnessPrologue.substr(1));
  std::string list = "[";
  for (std::size_t i = 0; i < t.exclusions.size(); ++i) {
    if (i) list += ", ";
    list += PhpSingleQuoted(t.exclusions[i]);
  }
  list += "]";
  // mt_srand takes a signed int; keep the seed in range.
  t.epilogue += "__fusefuzz_call(get_defined_vars(), " +
                std::to_string(rng_seed & 0x7fffffff) + ", " +
                std::to_string(max_calls) + ", " + list + ");\n";
  return t;
}

bool HasHarness(std::string_view body) {
  return body.find(kPrologueMarker) != std::string_view::npos ||
         body.find(kEpilogueMarker) != std::string_view::npos;
}

std::string InjectInterfaceFuzzing(std::string_view body,
                                   const HarnessTemplate& harness) {
  if (HasHarness(body)) {
    throw Error(ErrorCode::kAlreadyInjected, "harness markers already present");
  }
  const Program program = Segment(body);
  std::string out = program.preamble;
  if (out.empty()) out = "<?php\n";
  if (out.back() != '\n') out.push_back('\n');

  std::size_t first = 0;
  // `declare(strict_types=1)` must stay the first statement.
  if (!program.statements.empty() &&
      Trim(program.statements[0].text).substr(0, 7) == "declare") {
    out += program.statements[0].text;
    out += "\n";
    first = 1;
  }
  out += harness.prologue;
  for (std::size_t i = first; i < program.statements.size(); ++i) {
    out += program.statements[i].text;
  }
  std::string_view last;
  if (LastSignificantEnd(out, &last) != std::string_view::npos &&
      last != ";" && last != "}" && !program.statements.empty()) {
    out += ";";
  }
  out += "\n";
  out += harness.epilogue;
  out += program.postamble;
  return out;
}

EnvPlan CrossoverEnv(const TestCase& a, const TestCase& b,
                     const IniDictionary& dict, std::size_t k, double q,
                     Rng& rng) {
  EnvPlan env;
  env.insert_count = k;
  env.insert_prob = q;
  std::set<std::string> seen;
  for (const TestCase* t : {&a, &b}) {
    for (std::string_view line : SplitLines(t->Body("EXTENSIONS"))) {
      const std::string ext(Trim(line));
      if (!ext.empty() && seen.insert(ext).second) {
        env.merged_extensions.push_back(ext);
      }
    }
  }
  for (const TestCase* t : {&a, &b}) {
    for (std::string_view line : SplitLines(t->Body("INI"))) {
      if (!Trim(line).empty()) env.merged_ini.emplace_back(line);
    }
  }
  for (const TestCase* t : {&a, &b}) {
    if (t->Has("PHPDBG")) {
      env.has_phpdbg = true;
      env.merged_phpdbg += EnsureNewline(std::string(t->Body("PHPDBG")));
    }
  }
  if (!dict.empty() && k > 0 && rng.Bernoulli(q)) {
    std::vector<const std::string*> keys;
    for (const auto& [key, values] : dict.entries()) keys.push_back(&key);
    const std::size_t count = 1 + rng.Uniform(k);
    for (std::size_t i = 0; i < count; ++i) {
      const std::string& key = *keys[rng.Uniform(keys.size())];
      const auto& values = dict.entries().at(key);
      env.injected_ini.emplace_back(key, values[rng.Uniform(values.size())]);
    }
  }
  return env;
}

TestCase MergeSections(const TestCase& a, const TestCase& b,
                       std::string fused_body, const EnvPlan& env) {
  TestCase merged;
  merged.Append("TEST", "fused: " + std::string(Trim(a.Body("TEST"))) +
                            " + " + std::string(Trim(b.Body("TEST"))) + "\n");
  auto concat = [&](std::string_view name) {
    std::string body;
    for (const TestCase* t : {&a, &b}) {
      if (t->Has(name)) body += EnsureNewline(std::string(t->Body(name)));
    }
    if (a.Has(name) || b.Has(name)) merged.Append(std::string(name), body);
  };
  concat("SKIPIF");
  if (!env.merged_extensions.empty()) {
    std::string body;
    for (const std::string& ext : env.merged_extensions) body += ext + "\n";
    merged.Append("EXTENSIONS", body);
  }
  if (!env.merged_ini.empty() || !env.injected_ini.empty()) {
    std::string body;
    for (const std::string& line : env.merged_ini) body += line + "\n";
    for (const auto& [key, value] : env.injected_ini) {
      body += key + "=" + value + "\n";
    }
    merged.Append("INI", body);
  }
  if (env.has_phpdbg) merged.Append("PHPDBG", env.merged_phpdbg);
  merged.Append("FILE", EnsureNewline(std::move(fused_body)));
  merged.Append("EXPECTF", std::string(kAcceptAnyOutput));
  concat("CLEAN");

  static const std::set<std::string_view> kHandled = {
      "TEST",  "FILE",   "SKIPIF",   "EXTENSIONS",    "INI",
      "PHPDBG", "CLEAN", "FILEEOF", "FILE_EXTERNAL"};
  for (const TestCase* t : {&a, &b}) {
    for (const Section& s : t->sections()) {
      if (kHandled.count(s.name) || IsExpectSection(s.name) ||
          merged.Has(s.name)) {
        continue;
      }
      merged.Append(s.name, EnsureNewline(s.body));
    }
  }
  return merged;
}

}  // namespace fusefuzz
