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

#include "fusefuzz/campaign.h"

#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "fusefuzz/error.h"

namespace fusefuzz {

using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

using Clock = std::chrono::steady_clock;

int64_t NowMs() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

json ToJson(const MutationEvent& e) {
  return {{"kind", ToString(e.kind)},
          {"statement", e.statement},
          {"offset", e.range.begin},
          {"before", e.before},
          {"after", e.after}};
}

json ToJson(const FusionSide& side) {
  if (!side.active) return nullptr;
  json sites = json::array();
  for (const Site& s : side.sites) {
    sites.push_back({{"statement", s.statement},
                     {"offset", s.range.begin},
                     {"role", ToString(s.role)}});
  }
  return {{"chain", side.chain},
          {"chain_variables", side.chain_variables},
          {"variable", side.variable},
          {"sites", sites},
          {"forced", side.forced}};
}

void WriteFile(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

// The only shared mutable state of a campaign. Every call is serialized.
class Sink {
 public:
  Sink(const CampaignConfig& config)
      : config_(config),
        tests_dir_(config.out_dir / "tests"),
        logs_dir_(config.out_dir / "logs"),
        scratch_dir_(config.out_dir / "scratch"),
        crash_log_(config.out_dir / "crashes.jsonl") {
    store_ = CrashLog::Load(crash_log_.path());
    jsonl_.open(config.out_dir / "campaign.jsonl", std::ios::app);
    if (!jsonl_) {
      throw Error(ErrorCode::kOutDirUnwritable, config.out_dir.string());
    }
    json header = {{"type", "config"}, {"started", NowMs()}};
    header["config"] = ToJson(config);
    jsonl_ << header.dump() << "\n";
    jsonl_.flush();
  }

  void Submit(uint64_t worker, uint64_t iteration, const FusedTest& fused,
              const ExecutionOutcome& outcome, CampaignReport& report) {
    std::lock_guard<std::mutex> lock(mu_);
    ++report.executions;
    ++report.per_worker[worker];
    const std::string id = fused.test.Id();
    const bool crashed = outcome.status == ExitStatus::kCrash;
    if (crashed) ++report.crashes;
    if (outcome.status == ExitStatus::kTimeout) ++report.timeouts;

    const std::filesystem::path test_path = tests_dir_ / (id + ".phpt");
    if (crashed || config_.keep_all_tests) {
      WriteFile(test_path, SerializePhpt(fused.test));
    }
    if (crashed) {
      WriteFile(logs_dir_ / (id + ".log"), outcome.stderr_text);
    }

    std::vector<SanitizerFinding> findings = outcome.findings;
    if (crashed && findings.empty()) {
      // Signal without a sanitizer report.
      SanitizerFinding f;
      f.kind = "signal-" + std::to_string(outcome.signal);
      f.site = {"<signal>", outcome.signal, f.kind};
      f.stack_hash = Fnv1a64(f.kind);
      findings.push_back(std::move(f));
    }
    json record = {{"type", "exec"},
                   {"worker", worker},
                   {"iteration", iteration},
                   {"test_id", id},
                   {"provenance", ToJson(fused.provenance)},
                   {"outcome", ToJson(outcome)}};
    for (const SanitizerFinding& f : findings) {
      const InsertResult r =
          store_.Insert(f, test_path.string(), NowMs(), id);
      CrashRecord* rec = store_.FindMutable(f.site);
      if (r == InsertResult::kNew) {
        record["new_sites"].push_back(f.site.Key());
        spdlog::info("new crash site {} ({}) in test {}", f.site.Key(), f.kind,
                     id);
        if (config_.verify_new_sites && f.site.path != "<signal>") {
          try {
            Verify(*rec, config_.target,
                   config_.plain_target ? &*config_.plain_target : nullptr,
                   scratch_dir_);
          } catch (const Error& e) {
            spdlog::warn("verification of {} failed: {}", f.site.Key(),
                         e.what());
          }
        }
      }
      crash_log_.Append(*rec);
    }
    if (crash_log_.NeedsCompaction()) crash_log_.Compact(store_);
    jsonl_ << record.dump() << "\n";
    if (crashed) jsonl_.flush();
  }

  void SubmitError(uint64_t worker, uint64_t iteration, const std::string& what,
                   CampaignReport& report) {
    std::lock_guard<std::mutex> lock(mu_);
    ++report.generation_errors;
    json record = {{"type", "error"},
                   {"worker", worker},
                   {"iteration", iteration},
                   {"error", what}};
    jsonl_ << record.dump() << "\n";
  }

  void Close(CampaignReport& report) {
    std::lock_guard<std::mutex> lock(mu_);
    crash_log_.Compact(store_);
    report.records = store_.Snapshot();
    json footer = {{"type", "summary"},
                   {"executions", report.executions},
                   {"crashes", report.crashes},
                   {"timeouts", report.timeouts},
                   {"unique_sites", store_.size()}};
    jsonl_ << footer.dump() << "\n";
    jsonl_.flush();
  }

  const std::filesystem::path& scratch_dir() const { return scratch_dir_; }

 private:
  const CampaignConfig& config_;
  std::filesystem::path tests_dir_;
  std::filesystem::path logs_dir_;
  std::filesystem::path scratch_dir_;
  std::mutex mu_;
  std::ofstream jsonl_;
  CrashLog crash_log_;
  CrashStore store_;
};

}  // namespace

void RequestStop() { g_stop.store(true); }

json ToJson(const Provenance& p) {
  json j = {{"mode", ToString(p.mode)},
            {"rng_seed", p.rng_seed},
            {"seed_a", {{"id", p.seed_a}, {"path", p.seed_a_path}}}};
  if (p.mode == FuseMode::kSuiteReplay) return j;
  j["seed_b"] = {{"id", p.seed_b}, {"path", p.seed_b_path}};
  j["shared_name"] = p.plan.shared_name;
  j["p"] = p.plan.p;
  j["a"] = ToJson(p.plan.a);
  j["b"] = ToJson(p.plan.b);
  j["mutations_a"] = json::array();
  for (const MutationEvent& e : p.mutations_a) j["mutations_a"].push_back(ToJson(e));
  j["mutations_b"] = json::array();
  for (const MutationEvent& e : p.mutations_b) j["mutations_b"].push_back(ToJson(e));
  j["fallback"] = p.fallback;
  if (p.fallback) j["fallback_reason"] = p.fallback_reason;
  j["renames"] = json::array();
  for (const Rename& r : p.renames) j["renames"].push_back({r.from, r.to});
  j["harness_seed"] = p.harness_seed;
  j["injected_ini"] = json::array();
  for (const auto& [k, v] : p.injected_ini) j["injected_ini"].push_back({k, v});
  return j;
}

json ToJson(const CampaignConfig& c) {
  json j = {{"jobs", c.jobs},
            {"seed", c.seed},
            {"out", c.out_dir.string()},
            {"mode", ToString(c.fuse.mode)},
            {"p", c.fuse.p},
            {"mutation_rate", c.fuse.mutation_rate},
            {"k", c.fuse.k},
            {"q", c.fuse.q},
            {"max_calls", c.fuse.max_calls},
            {"interface_fuzzing", c.fuse.interface_fuzzing},
            {"ini_dictionary_keys",
             c.fuse.dictionary ? c.fuse.dictionary->size() : 0},
            {"target_cmd", c.target.command_template},
            {"timeout", c.target.timeout_s},
            {"env", c.target.env_vars},
            {"keep_tests", c.keep_all_tests},
            {"verify", c.verify_new_sites}};
  j["duration"] = c.duration_s ? json(*c.duration_s) : json();
  j["iterations"] = c.max_iterations ? json(*c.max_iterations) : json();
  j["plain_target_cmd"] =
      c.plain_target ? json(c.plain_target->command_template) : json();
  return j;
}

json ToJson(const ExecutionOutcome& o) {
  json findings = json::array();
  for (const SanitizerFinding& f : o.findings) {
    findings.push_back({{"kind", f.kind},
                        {"path", f.site.path},
                        {"line", f.site.line},
                        {"tool", f.tool},
                        {"stack_hash", f.stack_hash}});
  }
  return {{"status", ToString(o.status)},
          {"exit_code", o.exit_code},
          {"signal", o.signal},
          {"timed_out", o.timed_out},
          {"duration_ms", o.duration_ms},
          {"stdout_bytes", o.stdout_text.size()},
          {"stderr_bytes", o.stderr_text.size()},
          {"stdout_truncated", o.stdout_truncated},
          {"stderr_truncated", o.stderr_truncated},
          {"findings", findings}};
}

FusedTest GenerateTest(std::span<const TestCase> corpus,
                       const FuseConfig& config, uint64_t campaign_seed,
                       uint64_t worker, uint64_t iteration) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "no seeds");
  Rng rng(DeriveSeed(campaign_seed, worker, iteration));
  if (config.mode == FuseMode::kSuiteReplay) {
    const TestCase& seed = corpus[rng.Uniform(corpus.size())];
    return Fuse(seed, seed, config, rng.Next());
  }
  const auto [a, b] = PickSeeds(corpus, rng);
  return Fuse(*a, *b, config, rng.Next());
}

CampaignReport RunCampaign(std::span<const TestCase> corpus,
                           const CampaignConfig& config) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "no seeds");
  if (config.jobs == 0) throw Error(ErrorCode::kInvalidArgument, "jobs must be >= 1");
  config.target.Validate();
  std::error_code ec;
  for (const char* sub : {"tests", "logs", "scratch"}) {
    std::filesystem::create_directories(config.out_dir / sub, ec);
    if (ec) {
      throw Error(ErrorCode::kOutDirUnwritable,
                  (config.out_dir / sub).string() + ": " + ec.message());
    }
  }
  g_stop.store(false);

  CampaignReport report;
  report.per_worker.assign(config.jobs, 0);
  Sink sink(config);
  std::atomic<uint64_t> tickets{0};
  std::mutex failure_mu;
  const auto start = Clock::now();
  const auto deadline =
      config.duration_s
          ? std::optional(start + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(
                                          *config.duration_s)))
          : std::nullopt;

  auto worker_main = [&](uint64_t worker) {
    const std::filesystem::path stem =
        sink.scratch_dir() / ("w" + std::to_string(worker));
    for (uint64_t iteration = 0;; ++iteration) {
      if (g_stop.load()) break;
      if (deadline && Clock::now() >= *deadline) break;
      if (config.max_iterations &&
          tickets.fetch_add(1) >= *config.max_iterations) {
        break;
      }
      FusedTest fused;
      try {
        fused = GenerateTest(corpus, config.fuse, config.seed, worker,
                             iteration);
      } catch (const Error& e) {
        sink.SubmitError(worker, iteration, e.what(), report);
        if (e.code() == ErrorCode::kCorpusTooSmall) {
          std::lock_guard<std::mutex> lock(failure_mu);
          report.failure = e.what();
          g_stop.store(true);
        }
        continue;
      }
      try {
        const ExecutionOutcome outcome = RunTest(fused.test, config.target, stem);
        sink.Submit(worker, iteration, fused, outcome, report);
      } catch (const Error& e) {
        spdlog::error("worker {}: {}", worker, e.what());
        std::lock_guard<std::mutex> lock(failure_mu);
        if (report.failure.empty()) report.failure = e.what();
        g_stop.store(true);
        break;
      }
    }
    std::error_code ignored;
    std::filesystem::remove(stem.string() + ".php", ignored);
    std::filesystem::remove(stem.string() + ".phpt", ignored);
  };

  std::vector<std::thread> workers;
  for (uint64_t w = 0; w < config.jobs; ++w) workers.emplace_back(worker_main, w);
  for (std::thread& t : workers) t.join();
  sink.Close(report);
  report.elapsed_s =
      std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

}  // namespace fusefuzz
