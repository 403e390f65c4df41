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

#include "fusefuzz/harness.h"

#include <errno.h>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <fstream>
#include <map>
#include <thread>

#include "fusefuzz/error.h"

extern char** environ;

namespace fusefuzz {

namespace {

using Clock = std::chrono::steady_clock;

class Pipe {
 public:
  Pipe() {
    if (pipe2(fds_, O_CLOEXEC) != 0) {
      throw Error(ErrorCode::kSpawnFailure,
                  std::string("pipe: ") + std::strerror(errno));
    }
  }
  ~Pipe() {
    CloseRead();
    CloseWrite();
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;

  int read_fd() const { return fds_[0]; }
  int write_fd() const { return fds_[1]; }
  void CloseRead() { Close(0); }
  void CloseWrite() { Close(1); }

 private:
  void Close(int i) {
    if (fds_[i] >= 0) close(fds_[i]);
    fds_[i] = -1;
  }
  int fds_[2] = {-1, -1};
};

void Drain(int fd, std::string& into, std::size_t cap, bool& truncated,
           bool& open) {
  char buf[8192];
  const ssize_t n = read(fd, buf, sizeof(buf));
  if (n > 0) {
    const std::size_t room = cap > into.size() ? cap - into.size() : 0;
    into.append(buf, std::min<std::size_t>(room, n));
    if (static_cast<std::size_t>(n) > room) truncated = true;
  } else if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
    open = false;
  }
}

std::vector<std::string> BuildEnv(const std::vector<std::string>& extra) {
  std::map<std::string, std::string> vars;
  std::vector<std::string> order;
  auto put = [&](const std::string& kv) {
    const std::size_t eq = kv.find('=');
    const std::string key = kv.substr(0, eq);
    if (!vars.count(key)) order.push_back(key);
    vars[key] = kv;
  };
  for (char** e = environ; e && *e; ++e) put(*e);
  for (const std::string& kv : extra) put(kv);
  std::vector<std::string> env;
  for (const std::string& key : order) env.push_back(vars[key]);
  return env;
}

void WriteFile(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

void TargetSpec::Validate() const {
  if (command_template.find("{file}") == std::string::npos &&
      command_template.find("{phpt}") == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                "target command needs a {file} or {phpt} placeholder");
  }
  if (!(timeout_s > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "timeout must be positive");
  }
}

std::string_view ToString(ExitStatus status) {
  switch (status) {
    case ExitStatus::kClean:
      return "clean";
    case ExitStatus::kCrash:
      return "crash";
    case ExitStatus::kTimeout:
      return "timeout";
  }
  return "?";
}

std::vector<std::string> SplitCommand(std::string_view command) {
  std::vector<std::string> words;
  std::string word;
  bool in_word = false;
  char quote = 0;
  for (std::size_t i = 0; i < command.size(); ++i) {
    const char c = command[i];
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else if (c == '\\' && quote == '"' && i + 1 < command.size()) {
        word.push_back(command[++i]);
      } else {
        word.push_back(c);
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      in_word = true;
    } else if (c == '\\' && i + 1 < command.size()) {
      word.push_back(command[++i]);
      in_word = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_word) words.push_back(std::move(word));
      word.clear();
      in_word = false;
    } else {
      word.push_back(c);
      in_word = true;
    }
  }
  if (quote) {
    throw Error(ErrorCode::kInvalidArgument, "unbalanced quote in command");
  }
  if (in_word) words.push_back(std::move(word));
  return words;
}

std::vector<std::string> IniArgs(const TestCase& test) {
  std::vector<std::string> args;
  for (std::string_view line : SplitLines(test.Body("INI"))) {
    if (auto kv = ParseIniLine(line)) {
      args.push_back("-d");
      args.push_back(kv->first + "=" + kv->second);
    }
  }
  return args;
}

std::vector<std::string> RenderCommand(
    const TargetSpec& target, const std::string& file, const std::string& phpt,
    const std::vector<std::string>& ini_args) {
  std::vector<std::string> argv;
  for (std::string word : SplitCommand(target.command_template)) {
    if (word == "{ini_args}") {
      argv.insert(argv.end(), ini_args.begin(), ini_args.end());
      continue;
    }
    auto replace = [&](std::string_view key, const std::string& value) {
      for (std::size_t at = word.find(key); at != std::string::npos;
           at = word.find(key, at + value.size())) {
        word.replace(at, key.size(), value);
      }
    };
    std::string joined;
    for (const std::string& a : ini_args) joined += (joined.empty() ? "" : " ") + a;
    replace("{file}", file);
    replace("{phpt}", phpt);
    replace("{ini_args}", joined);
    argv.push_back(std::move(word));
  }
  if (argv.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty target command");
  }
  return argv;
}

ExecutionOutcome Execute(const std::vector<std::string>& argv,
                         const TargetSpec& target) {
  Pipe out, err;
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null",
                                   O_RDONLY, 0);
  posix_spawn_file_actions_adddup2(&actions, out.write_fd(), STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err.write_fd(), STDERR_FILENO);
  const std::string dir = target.working_dir.string();
  if (!dir.empty()) posix_spawn_file_actions_addchdir_np(&actions, dir.c_str());
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  // Own process group, so a timeout kill reaches grandchildren too.
  posix_spawnattr_setpgroup(&attr, 0);
  sigset_t defaults;
  sigemptyset(&defaults);
  sigaddset(&defaults, SIGPIPE);
  sigaddset(&defaults, SIGINT);
  posix_spawnattr_setsigdefault(&attr, &defaults);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP | POSIX_SPAWN_SETSIGDEF);

  std::vector<char*> args;
  for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  const std::vector<std::string> env = BuildEnv(target.env_vars);
  std::vector<char*> envp;
  for (const std::string& e : env) envp.push_back(const_cast<char*>(e.c_str()));
  envp.push_back(nullptr);

  const auto start = Clock::now();
  pid_t pid = -1;
  const int rc = posix_spawnp(&pid, args[0], &actions, &attr, args.data(),
                              envp.data());
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) {
    throw Error(ErrorCode::kSpawnFailure, argv[0] + ": " + std::strerror(rc));
  }
  out.CloseWrite();
  err.CloseWrite();

  ExecutionOutcome outcome;
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(
                  std::chrono::duration<double>(target.timeout_s));
  bool out_open = true, err_open = true;
  auto kill_group = [&] {
    kill(-pid, SIGKILL);
    kill(pid, SIGKILL);
    outcome.timed_out = true;
  };
  while (out_open || err_open) {
    const auto now = Clock::now();
    if (now >= deadline) {
      kill_group();
      break;
    }
    const int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
            .count() + 1);
    pollfd fds[2];
    nfds_t n = 0;
    if (out_open) fds[n++] = {out.read_fd(), POLLIN, 0};
    if (err_open) fds[n++] = {err.read_fd(), POLLIN, 0};
    const int ready = poll(fds, n, wait_ms);
    if (ready < 0 && errno != EINTR) break;
    for (nfds_t i = 0; i < n && ready > 0; ++i) {
      if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      if (fds[i].fd == out.read_fd()) {
        Drain(fds[i].fd, outcome.stdout_text, target.stream_cap,
              outcome.stdout_truncated, out_open);
      } else {
        Drain(fds[i].fd, outcome.stderr_text, target.stream_cap,
              outcome.stderr_truncated, err_open);
      }
    }
  }

  int status = 0;
  for (;;) {
    const pid_t done = waitpid(pid, &status, outcome.timed_out ? 0 : WNOHANG);
    if (done == pid) break;
    if (done < 0 && errno != EINTR) break;
    if (done == 0) {
      if (Clock::now() >= deadline) {
        kill_group();
      } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
      }
    }
  }
  outcome.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            Clock::now() - start)
                            .count();
  if (WIFEXITED(status)) {
    outcome.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    outcome.signal = WTERMSIG(status);
  }
  outcome.findings = ParseSanitizer(outcome.stderr_text);
  if (outcome.timed_out) {
    outcome.status = ExitStatus::kTimeout;
  } else if (!outcome.findings.empty() || outcome.signal != 0) {
    outcome.status = ExitStatus::kCrash;
  }
  return outcome;
}

ExecutionOutcome RunTest(const TestCase& test, const TargetSpec& target,
                         const std::filesystem::path& stem) {
  target.Validate();
  const std::string phpt = stem.string() + ".phpt";
  const std::string file = stem.string() + ".php";
  WriteFile(phpt, SerializePhpt(test));
  WriteFile(file, test.Body("FILE"));
  return Execute(RenderCommand(target, file, phpt, IniArgs(test)), target);
}

}  // namespace fusefuzz
