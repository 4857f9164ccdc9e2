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

#pragma once

#include <string>
#include <string_view>

// Minimal UTF-8 helpers. Malformed sequences decode to U+FFFD one byte at a
// time so that every input string has a defined code point sequence.
namespace screenlens::utf8 {

std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

bool is_space(char32_t cp);
bool is_alnum(char32_t cp);
char32_t to_lower(char32_t cp);

// Number of code points, counting malformed bytes as one each.
std::size_t length(std::string_view text);

// Longest prefix holding at most `max_chars` code points.
std::string_view prefix(std::string_view text, std::size_t max_chars);

} // namespace screenlens::utf8
