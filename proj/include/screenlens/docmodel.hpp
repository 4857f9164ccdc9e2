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

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "screenlens/error.hpp"

namespace screenlens::docmodel {

using Timestamp = std::chrono::sys_seconds;

class InvalidSubject : public Error {
public:
  explicit InvalidSubject(const std::string& subject)
      : Error("invalid subject id '" + subject + "': must be non-empty without '_'") {}
};

// Names the first element or field that violates the batch schema.
class SchemaError : public Error {
public:
  SchemaError(std::string element, const std::string& detail)
      : Error("schema error at '" + element + "': " + detail), element_(std::move(element)) {}
  const std::string& element() const noexcept { return element_; }

private:
  std::string element_;
};

class TimestampError : public Error {
public:
  explicit TimestampError(std::string raw)
      : Error("unparseable timestamp '" + raw + "'"), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

private:
  std::string raw_;
};

struct ScreenshotDocument {
  std::string id;
  Timestamp timestamp{};
  std::optional<std::string> category;
  std::string text;
  std::optional<std::string> previous_image;
  std::optional<std::string> next_image;
  // Where the screenshot lives; not part of the XML schema.
  std::string image_path;

  friend bool operator==(const ScreenshotDocument&, const ScreenshotDocument&) = default;
};

// 2017-03-02T14:05:09Z
std::string format_iso(Timestamp ts);
// 20170302T140509
std::string format_compact(Timestamp ts);
// Accepts either form above; a trailing "Z" or "+00:00" is optional.
Timestamp parse_timestamp(std::string_view raw);

// "<subject>_<YYYYMMDDTHHMMSS>"
std::string make_id(std::string_view subject, Timestamp captured_at);

struct ParsedId {
  std::string subject;
  Timestamp timestamp;
};
// Throws SchemaError("id", ...) when the id is not of make_id's shape.
ParsedId parse_id(std::string_view id);

std::string xml_escape(std::string_view text);

// One <add> batch holding one <doc> per document, six fields each.
std::string to_xml(const ScreenshotDocument& doc);
std::string to_xml(std::span<const ScreenshotDocument> docs);

std::vector<ScreenshotDocument> from_xml(std::string_view xml);

// Chains each subject's documents by capture time (ties broken by id) and
// fills previous_image/next_image with the neighbours' image paths. Output
// keeps the input order.
std::vector<ScreenshotDocument> link_timeline(std::vector<ScreenshotDocument> docs);

// Recovers missing image_path values from the neighbours' links: a
// document's path is its predecessor's next_image or its successor's
// previous_image. Documents on a single-entry timeline stay unresolved.
std::vector<ScreenshotDocument> resolve_image_paths(std::vector<ScreenshotDocument> docs);

} // namespace screenlens::docmodel
