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
#include <filesystem>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "screenlens/error.hpp"
#include "screenlens/imaging.hpp"

namespace screenlens::ocr {

using imaging::BoundingBox;
using imaging::GrayImage;

inline constexpr std::string_view kInputPlaceholder = "{input}";
inline constexpr std::string_view kOutputPlaceholder = "{output}";
inline constexpr const char* kEngineEnvVar = "SCREENLENS_OCR_CMD";

// How to run a command-line OCR engine. The template is run through
// /bin/sh with {input} replaced by the crop image path and {output} by an
// output path; the engine may write either that path or "<output>.txt"
// (tesseract's convention).
struct OcrEngineConfig {
  std::string command_template = "tesseract {input} {output}";
  std::chrono::milliseconds timeout{30'000};
  std::string label = "tesseract";
  int max_concurrent = 4;

  // Throws ConfigError unless each placeholder occurs exactly once and the
  // timeout and concurrency cap are positive.
  void validate() const;
  // Replaces the template with $SCREENLENS_OCR_CMD when it is set.
  void apply_env_override();
};

// Engine failures carry the box of the segment being recognised.
class EngineError : public Error {
public:
  EngineError(const std::string& what, BoundingBox box) : Error(what), box_(box) {}
  const BoundingBox& box() const noexcept { return box_; }

private:
  BoundingBox box_;
};

class EngineNotFound : public EngineError {
public:
  using EngineError::EngineError;
};

class EngineTimeout : public EngineError {
public:
  using EngineError::EngineError;
};

class EngineFailure : public EngineError {
public:
  using EngineError::EngineError;
};

class TextRecognizer {
public:
  virtual ~TextRecognizer() = default;
  // Recognised text of one crop with trailing whitespace removed.
  virtual std::string recognize(const GrayImage& crop, const BoundingBox& box) const = 0;
};

// Runs the configured external command once per crop, each call in a private
// temporary directory. At most max_concurrent engine processes run at once
// across all threads sharing this object.
class CommandEngine final : public TextRecognizer {
public:
  explicit CommandEngine(OcrEngineConfig config);

  std::string recognize(const GrayImage& crop, const BoundingBox& box) const override;
  const OcrEngineConfig& config() const noexcept { return config_; }

private:
  OcrEngineConfig config_;
  std::shared_ptr<std::counting_semaphore<>> slots_;
};

std::string recognize_segment(const GrayImage& crop, const BoundingBox& box,
                              const TextRecognizer& engine);

std::string trim_trailing_whitespace(std::string text);

enum class FailurePolicy { Skip, Abort };

struct SegmentText {
  BoundingBox box;
  std::string text;
};

struct SegmentFailure {
  BoundingBox box;
  std::string message;
};

struct ExtractedText {
  // Non-empty segment texts joined by '\n' in scan order.
  std::string full_text;
  std::vector<SegmentText> segments;
  std::vector<SegmentFailure> failures;
  bool banner_removed = false;
};

// Joins the non-empty segment texts with single newlines.
std::string join_segments(const std::vector<SegmentText>& segments);

// Segments the image and recognises every segment. Engine errors are
// recorded in `failures` under Skip and rethrown under Abort.
ExtractedText extract_text(const imaging::RasterImage& img,
                           const imaging::SegmentationParams& params,
                           const TextRecognizer& engine,
                           FailurePolicy policy = FailurePolicy::Skip);

// Token sets that may accompany the clock on a status-bar line.
struct BannerRules {
  std::vector<std::string> network_tokens = {"2G",  "3G",    "4G",    "5G",    "4G+", "5G+",
                                             "LTE", "LTE+",  "VoLTE", "H",     "H+",  "E",
                                             "EDGE", "WiFi", "Wi-Fi", "WLAN",  "VPN", "NR"};
};

// Reads "network = tok, tok, ..." lines; '#' starts a comment. Keys other
// than "network" are rejected.
BannerRules load_banner_rules(const std::filesystem::path& path);

// A line with a clock token (h:mm or hh:mm, optional AM/PM) whose other
// tokens are percentages, network tokens or runs of symbols.
bool is_banner_line(std::string_view line, const BannerRules& rules = {});

struct BannerStrip {
  std::string text;
  bool removed = false;
};

// Removes the first line when it looks like a status bar and some later line
// carries text. A banner-only text is returned unchanged.
BannerStrip strip_banner(std::string_view text, const BannerRules& rules = {});

// Same rule applied to extracted text, keeping full_text equal to the join of
// the segment texts.
void strip_banner(ExtractedText& extracted, const BannerRules& rules = {});

} // namespace screenlens::ocr
