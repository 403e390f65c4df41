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

#include "fusefuzz/cli.h"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include <spdlog/spdlog.h>

#include "fusefuzz/campaign.h"
#include "fusefuzz/dataflow.h"
#include "fusefuzz/error.h"
#include "fusefuzz/fusion.h"
#include "fusefuzz/reduce.h"
#include "fusefuzz/triage.h"

namespace fusefuzz {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfra = 2;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Options shared by `run` and `fuse`.
struct FuseOptions {
  double p = kDefaultReplaceProbability;
  double mutation_rate = kDefaultMutationRate;
  std::string mode = "fusion";
  std::size_t k = kDefaultInsertCount;
  double q = kDefaultInsertProbability;
  std::size_t max_calls = kDefaultMaxCalls;
  bool no_interface = false;
  std::string ini_dict;

  void Register(CLI::App* app) {
    app->add_option("--p", p, "Per-site replacement probability")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--mutation-rate", mutation_rate,
                    "Per-site mutation probability")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--mode", mode, "fusion | concat | suite-replay")
        ->check(CLI::IsMember({"fusion", "concat", "suite-replay"}));
    app->add_option("--k", k, "Max INI options injected per test");
    app->add_option("--q", q, "Probability of injecting INI options")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--max-calls", max_calls,
                    "Functions called by the interface-fuzzing epilogue");
    app->add_flag("--no-interface", no_interface,
                  "Do not inject the interface-fuzzing harness");
    app->add_option("--ini-dict", ini_dict,
                    "Extra key=value INI dictionary file");
  }

  FuseConfig Build(const IniDictionary* dict) const {
    FuseConfig c;
    c.mode = *ParseFuseMode(mode);
    c.p = p;
    c.mutation_rate = mutation_rate;
    c.k = k;
    c.q = q;
    c.max_calls = max_calls;
    c.interface_fuzzing = !no_interface;
    c.dictionary = dict;
    return c;
  }
};

struct TargetOptions {
  std::string cmd;
  double timeout = kDefaultTimeoutSeconds;
  std::vector<std::string> env;
  std::string workdir;

  void Register(CLI::App* app, bool required) {
    auto* opt = app->add_option("--target-cmd", cmd,
                                "Target command; {file}, {phpt}, {ini_args}")
                    ->envname("FUSEFUZZ_TARGET_CMD");
    if (required) opt->required();
    app->add_option("--timeout", timeout, "Seconds per execution")
        ->check(CLI::PositiveNumber);
    app->add_option("--env", env, "KEY=VALUE passed to the target");
    app->add_option("--workdir", workdir, "Working directory of the target");
  }

  TargetSpec Build() const {
    TargetSpec t;
    t.command_template = cmd;
    t.timeout_s = timeout;
    t.env_vars = env;
    t.working_dir = workdir;
    return t;
  }
};

void PrintChains(const std::string& body, std::ostream& out) {
  const Program program = Segment(body);
  if (program.statements.empty()) return;
  for (const DataflowChain& chain :
       FindChains(ComputeFlowSets(program), program)) {
    out << FormatChain(chain) << "\n";
  }
}

std::optional<TestCase> TryParsePhpt(const std::string& text,
                                     const std::string& path) {
  try {
    return ParsePhpt(text, path);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Dataflow-fusion fuzzer for phpt test suites", "fuse"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.set_config("--config", "",
                 "TOML/INI file; options go under a [run] etc. section");

  // run
  CLI::App* run = app.add_subcommand("run", "Run a fuzzing campaign");
  std::string corpus_root;
  std::size_t jobs = 1;
  std::optional<double> duration;
  std::optional<uint64_t> iterations;
  uint64_t seed = 0;
  std::string out_dir = "out";
  std::string plain_cmd;
  bool keep_tests = false;
  bool no_verify = false;
  FuseOptions run_fuse;
  TargetOptions run_target;
  run->add_option("--corpus", corpus_root, "Directory of .phpt seeds")
      ->required();
  run_target.Register(run, true);
  run->add_option("--jobs", jobs, "Parallel workers")
      ->check(CLI::PositiveNumber);
  run->add_option("--duration", duration, "Seconds to run")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--iterations", iterations, "Total executions");
  run->add_option("--seed", seed, "Campaign seed");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--plain-target-cmd", plain_cmd,
                  "Target built without sanitizers, for verification");
  run->add_flag("--keep-tests", keep_tests, "Store every generated test");
  run->add_flag("--no-verify", no_verify, "Skip re-running new crash sites");
  run_fuse.Register(run);

  // fuse
  CLI::App* fuse = app.add_subcommand("fuse", "Fuse two phpt files to stdout");
  std::string file_a, file_b;
  uint64_t fuse_seed = 0;
  bool show_provenance = false;
  FuseOptions fuse_opts;
  fuse->add_option("a", file_a, "First seed")->required();
  fuse->add_option("b", file_b, "Second seed")->required();
  fuse->add_option("--seed", fuse_seed, "RNG seed");
  fuse->add_flag("--provenance", show_provenance,
                 "Print provenance JSON to stderr");
  fuse_opts.Register(fuse);

  // analyze
  CLI::App* analyze = app.add_subcommand("analyze", "Print dataflow chains");
  std::string analyze_file;
  analyze->add_option("file", analyze_file, "phpt file or PHP script")
      ->required();

  // triage
  CLI::App* triage = app.add_subcommand("triage", "Report crash sites");
  std::string triage_dir;
  bool triage_json = false;
  triage->add_option("out", triage_dir, "Campaign output directory")
      ->required();
  triage->add_flag("--json", triage_json, "JSON output");

  // reduce
  CLI::App* reduce = app.add_subcommand("reduce", "Minimize a crashing test");
  std::string record_id, reduce_out = "out";
  std::size_t budget = kDefaultReduceBudget;
  TargetOptions reduce_target;
  reduce->add_option("--record", record_id, "Test id or path:line site")
      ->required();
  reduce->add_option("--out", reduce_out, "Campaign output directory");
  reduce->add_option("--budget", budget, "Max predicate runs");
  reduce_target.Register(reduce, true);

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*run) {
      if (!std::filesystem::is_directory(corpus_root)) {
        err << "corpus directory not found: " << corpus_root << "\n";
        return kExitUsage;
      }
      const CorpusLoad corpus = LoadCorpus(corpus_root);
      IniDictionary dict = BuildIniDictionary(corpus.tests);
      if (!run_fuse.ini_dict.empty()) dict.LoadFile(run_fuse.ini_dict);
      CampaignConfig config;
      config.jobs = jobs;
      config.duration_s = duration;
      config.max_iterations = iterations;
      config.seed = seed;
      config.out_dir = out_dir;
      config.fuse = run_fuse.Build(&dict);
      config.target = run_target.Build();
      if (!plain_cmd.empty()) {
        TargetSpec plain = config.target;
        plain.command_template = plain_cmd;
        config.plain_target = plain;
      }
      config.keep_all_tests = keep_tests;
      config.verify_new_sites = !no_verify;
      try {
        config.target.Validate();
      } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitUsage;
      }
      spdlog::info("{} seeds loaded ({} skipped), {} workers, mode {}",
                   corpus.tests.size(), corpus.skipped.size(), jobs,
                   run_fuse.mode);
      const CampaignReport report = RunCampaign(corpus.tests, config);
      out << report.executions << " executions, " << report.crashes
          << " crashes, " << report.timeouts << " timeouts, "
          << report.records.size() << " unique crash sites in "
          << report.elapsed_s << " s\n";
      if (!report.failure.empty()) {
        err << "campaign stopped: " << report.failure << "\n";
        return kExitInfra;
      }
      return kExitOk;
    }

    if (*fuse) {
      const TestCase a = ParsePhpt(ReadFile(file_a), file_a);
      const TestCase b = ParsePhpt(ReadFile(file_b), file_b);
      const TestCase pair[] = {a, b};
      const IniDictionary dict = [&] {
        IniDictionary d = BuildIniDictionary(pair);
        if (!fuse_opts.ini_dict.empty()) d.LoadFile(fuse_opts.ini_dict);
        return d;
      }();
      const FusedTest fused = Fuse(a, b, fuse_opts.Build(&dict), fuse_seed);
      out << SerializePhpt(fused.test);
      if (show_provenance) err << ToJson(fused.provenance).dump(2) << "\n";
      return kExitOk;
    }

    if (*analyze) {
      const std::string text = ReadFile(analyze_file);
      const std::optional<TestCase> test = TryParsePhpt(text, analyze_file);
      PrintChains(test ? std::string(test->Body("FILE")) : text, out);
      return kExitOk;
    }

    if (*triage) {
      const CrashStore store =
          CrashLog::Load(std::filesystem::path(triage_dir) / "crashes.jsonl");
      if (triage_json) {
        out << ReportJson(store).dump(2) << "\n";
      } else {
        out << FormatReport(store);
      }
      return kExitOk;
    }

    if (*reduce) {
      const std::filesystem::path dir = reduce_out;
      const CrashStore store = CrashLog::Load(dir / "crashes.jsonl");
      const CrashRecord* record = nullptr;
      for (const CrashRecord& r : store.Snapshot()) {
        if (r.test_id == record_id || r.site.Key() == record_id) {
          record = store.Find(r.site);
          break;
        }
      }
      if (!record) {
        err << "no crash record " << record_id << " in "
            << (dir / "crashes.jsonl").string() << "\n";
        return kExitUsage;
      }
      const TestCase test =
          ParsePhpt(ReadFile(record->exemplar), record->exemplar);
      std::filesystem::create_directories(dir / "reduced");
      const ReductionResult result = Reduce(
          test, reduce_target.Build(), record->site, budget, dir / "reduced");
      const std::filesystem::path path =
          dir / "reduced" / (record->test_id + ".phpt");
      std::ofstream(path, std::ios::binary) << SerializePhpt(result.reduced_test);
      out << record->site.Key() << ": " << result.original_lines << " -> "
          << result.reduced_lines << " lines, " << result.predicate_runs
          << " runs" << (result.budget_exhausted ? " (budget exhausted)" : "")
          << ", written to " << path.string() << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kSpawnFailure:
      case ErrorCode::kOutDirUnwritable:
        return kExitInfra;
      default:
        return kExitUsage;
    }
  }
  return kExitUsage;
}

}  // namespace fusefuzz
