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

// Generators and fixture builders shared by the unit and acceptance suites.
#pragma once

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <unistd.h>
#include <sys/wait.h>
#include <vector>

#include "screenlens/docmodel.hpp"
#include "screenlens/imaging.hpp"

namespace fixtures {

namespace fs = std::filesystem;

inline std::string random_hostile_text(std::mt19937& rng, std::size_t max_len = 60) {
  static const std::vector<std::string> pieces = {
      "a", "Z", " ", "  ", "\n", "\r\n", "\t", "<", ">", "&", "&amp;", "\"", "'", "]]>", "<![CDATA[",
      "é", "日本", "😀", "\x01", "\x1f", "\x7f", "--", "<!--", "?>", "<field name=\"id\">", ";", "&#"};
  std::uniform_int_distribution<std::size_t> len(0, max_len), pick(0, pieces.size() - 1);
  std::string out;
  for (auto n = len(rng); n > 0; --n) out += pieces[pick(rng)];
  return out;
}

inline screenlens::docmodel::Timestamp random_time(std::mt19937& rng) {
  // 2000-01-01 .. 2030-12-31
  std::uniform_int_distribution<long long> secs(946684800LL, 1924905600LL);
  return screenlens::docmodel::Timestamp(std::chrono::seconds(secs(rng)));
}

inline screenlens::docmodel::ScreenshotDocument random_document(std::mt19937& rng, int serial) {
  screenlens::docmodel::ScreenshotDocument d;
  d.timestamp = random_time(rng);
  d.id = screenlens::docmodel::make_id("s" + std::to_string(serial), d.timestamp);
  std::bernoulli_distribution coin(0.5);
  auto non_empty = [&] {
    auto s = random_hostile_text(rng, 8);
    return s.empty() ? std::string("x") : s;
  };
  if (coin(rng)) d.category = non_empty();
  d.text = random_hostile_text(rng);
  if (coin(rng)) d.previous_image = "/img/" + non_empty();
  if (coin(rng)) d.next_image = "/img/" + non_empty();
  return d;
}

inline screenlens::docmodel::Timestamp at(int y, unsigned mo, unsigned d, int h, int mi, int s) {
  using namespace std::chrono;
  return sys_days{year{y} / month{mo} / day{d}} + hours{h} + minutes{mi} + seconds{s};
}

// Scratch directory removed on destruction.
class TempDir {
public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "screenlens-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

private:
  fs::path path_;
};

// White canvas with dark rectangles standing in for lines of text.
inline screenlens::imaging::RasterImage blocks_image(int w, int h,
                                                     const std::vector<screenlens::imaging::BoundingBox>& blocks) {
  screenlens::imaging::RasterImage img(w, h, 250, 250, 250);
  for (const auto& b : blocks)
    for (int y = b.y; y < b.bottom(); ++y)
      for (int x = b.x; x < b.right(); ++x) img.set(x, y, 15, 15, 15);
  return img;
}

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

// Runs a shell command, capturing stdout.
inline CommandResult run(const std::string& command) {
  CommandResult r;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed: " + command);
  std::array<char, 4096> buf;
  while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

} // namespace fixtures
