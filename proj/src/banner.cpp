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

#include <algorithm>
#include <fstream>
#include <regex>

#include "screenlens/ocr.hpp"
#include "screenlens/utf8.hpp"

namespace screenlens::ocr {
namespace {

const std::regex& clock_pattern() {
  static const std::regex re(R"(\d{1,2}:\d{2}([AaPp]\.?[Mm]\.?)?)");
  return re;
}

const std::regex& meridiem_pattern() {
  static const std::regex re(R"([AaPp]\.?[Mm]\.?)");
  return re;
}

const std::regex& percent_pattern() {
  static const std::regex re(R"(\d{1,3}%)");
  return re;
}

std::string ascii_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c);
  });
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char32_t cp : utf8::decode(line)) {
    if (utf8::is_space(cp)) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      utf8::append(cur, cp);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

bool is_symbol_run(std::string_view token) {
  const auto cps = utf8::decode(token);
  return std::none_of(cps.begin(), cps.end(), [](char32_t c) { return utf8::is_alnum(c); });
}

bool has_visible_text(std::string_view text) {
  const auto cps = utf8::decode(text);
  return std::any_of(cps.begin(), cps.end(), [](char32_t c) { return !utf8::is_space(c); });
}

} // namespace

BannerRules load_banner_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read banner rules " + path.string());
  BannerRules rules;
  rules.network_tokens.clear();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)) != "network")
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected 'network = token, ...'");
    std::string_view rest = std::string_view(line).substr(eq + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string tok = trim(rest.substr(0, comma));
      if (!tok.empty()) rules.network_tokens.push_back(tok);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  return rules;
}

bool is_banner_line(std::string_view line, const BannerRules& rules) {
  const auto tokens = split_tokens(line);
  bool clock = false;
  bool after_clock = false;
  for (const auto& tok : tokens) {
    const bool was_after_clock = after_clock;
    after_clock = false;
    if (std::regex_match(tok, clock_pattern())) {
      clock = true;
      after_clock = true;
      continue;
    }
    if (was_after_clock && std::regex_match(tok, meridiem_pattern())) continue;
    if (std::regex_match(tok, percent_pattern())) continue;
    const std::string lower = ascii_lower(tok);
    if (std::any_of(rules.network_tokens.begin(), rules.network_tokens.end(),
                    [&](const std::string& n) { return ascii_lower(n) == lower; }))
      continue;
    if (is_symbol_run(tok)) continue;
    return false;
  }
  return clock;
}

BannerStrip strip_banner(std::string_view text, const BannerRules& rules) {
  const auto nl = text.find('\n');
  if (nl == std::string_view::npos) return {std::string(text), false};
  const auto first = text.substr(0, nl);
  const auto rest = text.substr(nl + 1);
  if (!is_banner_line(first, rules) || !has_visible_text(rest)) return {std::string(text), false};
  return {std::string(rest), true};
}

void strip_banner(ExtractedText& extracted, const BannerRules& rules) {
  const BannerStrip stripped = strip_banner(extracted.full_text, rules);
  if (!stripped.removed) return;
  // The first line of the joined text is the first line of the first
  // non-empty segment.
  for (auto& seg : extracted.segments) {
    if (seg.text.empty()) continue;
    const auto nl = seg.text.find('\n');
    seg.text = nl == std::string::npos ? std::string() : seg.text.substr(nl + 1);
    break;
  }
  extracted.full_text = join_segments(extracted.segments);
  extracted.banner_removed = true;
}

} // namespace screenlens::ocr
