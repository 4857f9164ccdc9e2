// Copyright 2026 The ScreenLens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "screenlens/ocr.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <stdlib.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "screenlens/image_io.hpp"
#include "screenlens/utf8.hpp"

extern char** environ;

namespace screenlens::ocr {
namespace {

namespace fs = std::filesystem;

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size()))
    ++n;
  return n;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  out += '\'';
  return out;
}

std::string replace_once(std::string s, std::string_view what, const std::string& with) {
  const auto pos = s.find(what);
  if (pos != std::string::npos) s.replace(pos, what.size(), with);
  return s;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// mkdtemp-backed scratch directory, removed with its contents on scope exit.
class ScratchDir {
public:
  ScratchDir() {
    std::string tmpl = (fs::temp_directory_path() / "screenlens-ocr-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw IoError("cannot create temporary directory: " + std::string(std::strerror(errno)));
    path_ = tmpl;
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const fs::path& path() const noexcept { return path_; }

private:
  fs::path path_;
};

struct SpawnActions {
  posix_spawn_file_actions_t actions;
  posix_spawnattr_t attr;
  SpawnActions() {
    posix_spawn_file_actions_init(&actions);
    posix_spawnattr_init(&attr);
  }
  ~SpawnActions() {
    posix_spawn_file_actions_destroy(&actions);
    posix_spawnattr_destroy(&attr);
  }
};

// Semaphore slot held for the lifetime of one engine process.
class SlotGuard {
public:
  explicit SlotGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

private:
  std::counting_semaphore<>& sem_;
};

std::string excerpt(const std::string& s) {
  std::string e(utf8::prefix(s, 200));
  std::replace(e.begin(), e.end(), '\n', ' ');
  return e;
}

} // namespace

void OcrEngineConfig::validate() const {
  if (count_occurrences(command_template, kInputPlaceholder) != 1 ||
      count_occurrences(command_template, kOutputPlaceholder) != 1)
    throw ConfigError("engine command template must contain {input} and {output} exactly once: " +
                      command_template);
  if (timeout.count() <= 0) throw ConfigError("engine timeout must be positive");
  if (max_concurrent < 1) throw ConfigError("engine concurrency cap must be >= 1");
}

void OcrEngineConfig::apply_env_override() {
  if (const char* cmd = std::getenv(kEngineEnvVar); cmd && *cmd) command_template = cmd;
}

CommandEngine::CommandEngine(OcrEngineConfig config)
    : config_(std::move(config)),
      slots_(std::make_shared<std::counting_semaphore<>>(std::max(1, config_.max_concurrent))) {
  config_.validate();
}

std::string CommandEngine::recognize(const GrayImage& crop, const BoundingBox& box) const {
  ScratchDir dir;
  const fs::path input = dir.path() / "segment.png";
  const fs::path output = dir.path() / "out";
  const fs::path errors = dir.path() / "stderr.log";
  imaging::write_png(crop, input);

  std::string command = replace_once(config_.command_template, kInputPlaceholder, shell_quote(input.string()));
  command = replace_once(command, kOutputPlaceholder, shell_quote(output.string()));

  SpawnActions sa;
  posix_spawn_file_actions_addopen(&sa.actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&sa.actions, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
  posix_spawn_file_actions_addopen(&sa.actions, STDERR_FILENO, errors.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0600);
  // Own process group, so a timeout kills the engine and anything it forked.
  posix_spawnattr_setflags(&sa.attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&sa.attr, 0);

  std::string sh = "/bin/sh";
  std::string dash_c = "-c";
  char* argv[] = {sh.data(), dash_c.data(), command.data(), nullptr};

  SlotGuard slot(*slots_);
  pid_t pid = 0;
  if (const int rc = posix_spawn(&pid, "/bin/sh", &sa.actions, &sa.attr, argv, environ); rc != 0)
    throw EngineNotFound("cannot start /bin/sh: " + std::string(std::strerror(rc)), box);

  const auto deadline = std::chrono::steady_clock::now() + config_.timeout;
  auto pause = std::chrono::milliseconds(1);
  int status = 0;
  for (;;) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0 && errno != EINTR)
      throw EngineFailure("waitpid failed: " + std::string(std::strerror(errno)), box);
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      throw EngineTimeout(config_.label + " exceeded " + std::to_string(config_.timeout.count()) +
                              " ms",
                          box);
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::milliseconds(20));
  }

  if (WIFSIGNALED(status))
    throw EngineFailure(config_.label + " killed by signal " + std::to_string(WTERMSIG(status)), box);
  const int code = WEXITSTATUS(status);
  if (code == 126 || code == 127)
    throw EngineNotFound(config_.label + " not runnable (exit " + std::to_string(code) +
                             "): " + excerpt(read_file(errors)),
                         box);
  if (code != 0)
    throw EngineFailure(config_.label + " exited with status " + std::to_string(code) + ": " +
                            excerpt(read_file(errors)),
                        box);

  fs::path produced = output;
  if (!fs::exists(produced)) produced += ".txt";
  if (!fs::exists(produced)) throw EngineFailure(config_.label + " produced no output file", box);
  return trim_trailing_whitespace(read_file(produced));
}

std::string recognize_segment(const GrayImage& crop, const BoundingBox& box,
                              const TextRecognizer& engine) {
  return trim_trailing_whitespace(engine.recognize(crop, box));
}

std::string trim_trailing_whitespace(std::string text) {
  const auto cps = utf8::decode(text);
  std::size_t keep = cps.size();
  while (keep > 0 && utf8::is_space(cps[keep - 1])) --keep;
  if (keep == cps.size()) return text;
  return utf8::encode(std::u32string_view(cps).substr(0, keep));
}

std::string join_segments(const std::vector<SegmentText>& segments) {
  std::string out;
  bool first = true;
  for (const auto& s : segments) {
    if (s.text.empty()) continue;
    if (!first) out += '\n';
    out += s.text;
    first = false;
  }
  return out;
}

ExtractedText extract_text(const imaging::RasterImage& img,
                           const imaging::SegmentationParams& params,
                           const TextRecognizer& engine, FailurePolicy policy) {
  ExtractedText result;
  for (const auto& seg : imaging::segment(img, params)) {
    try {
      result.segments.push_back({seg.box, recognize_segment(seg.crop, seg.box, engine)});
    } catch (const EngineError& e) {
      if (policy == FailurePolicy::Abort) throw;
      result.failures.push_back({e.box(), e.what()});
    }
  }
  result.full_text = join_segments(result.segments);
  return result;
}

} // namespace screenlens::ocr
