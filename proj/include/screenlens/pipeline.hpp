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

#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenlens/docmodel.hpp"
#include "screenlens/imaging.hpp"
#include "screenlens/index.hpp"
#include "screenlens/metrics.hpp"
#include "screenlens/ocr.hpp"

namespace screenlens::pipeline {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

// Maps an image file stem to (subject, capture time). The template holds
// {subject} and {timestamp} once each; {timestamp} matches YYYYMMDDTHHMMSS
// and {subject} a run without underscores. Everything else is literal.
class FilenamePattern {
public:
  explicit FilenamePattern(std::string pattern = "{subject}_{timestamp}");

  struct Match {
    std::string subject;
    docmodel::Timestamp timestamp;
  };
  std::optional<Match> match(const std::string& stem) const;
  const std::string& pattern() const noexcept { return pattern_; }

private:
  std::string pattern_;
  std::regex regex_;
  bool subject_first_ = true;
};

struct PipelineConfig {
  fs::path input_dir;
  fs::path output_dir;
  imaging::SegmentationParams segmentation;
  ocr::OcrEngineConfig engine;
  ocr::BannerRules banner_rules;
  bool strip_banner = true;
  int parallelism = 1;
  std::string filename_pattern = "{subject}_{timestamp}";
  ocr::FailurePolicy segment_failures = ocr::FailurePolicy::Skip;

  // Throws ConfigError on a missing input directory, a bad pattern or a
  // non-positive parallelism.
  void validate() const;
};

struct ImageFailure {
  fs::path image;
  std::string message;
};

struct ExtractSummary {
  std::size_t images = 0;
  std::size_t succeeded = 0;
  std::size_t segments = 0;
  std::size_t segment_failures = 0;
  std::size_t banners_removed = 0;
  std::vector<ImageFailure> failures;
  fs::path xml_path;

  int exit_code() const noexcept { return failures.empty() ? kExitOk : kExitPartial; }
};

inline constexpr const char* kBatchFileName = "batch.xml";

// Per image, in file-name order: segment, recognise, optionally strip the
// banner, write <stem>.txt. Then link timelines and write one XML batch,
// atomically, to <output>/batch.xml. Image-level failures are recorded, not
// thrown.
ExtractSummary cmd_extract(const PipelineConfig& config, const ocr::TextRecognizer& engine);
// Uses a CommandEngine; throws ConfigError when the engine binary is absent.
ExtractSummary cmd_extract(const PipelineConfig& config);

// True when the first word of the command template resolves to an
// executable (directly or through PATH).
bool engine_available(const std::string& command_template);

struct EvaluationOutcome {
  metrics::CorpusReport report;
  std::vector<std::string> unmatched_hypotheses;
  std::vector<std::string> unmatched_references;
};

// Pairs <stem>.txt files of both directories by stem.
EvaluationOutcome cmd_evaluate(const fs::path& hyp_dir, const fs::path& ref_dir,
                               const metrics::NormalizeOptions& opts = {});

// ER and Accuracy at character and word level plus PER, one row per
// document and a micro-averaged corpus row. Accuracy = 100% - ER.
std::string format_table(const metrics::CorpusReport& report);
nlohmann::json to_json(const EvaluationOutcome& outcome);

// Rate as hundredths of a percent (basis points), rounded half away from zero.
long long rate_basis_points(double rate);
std::string format_percent(long long basis_points);

struct IndexStats {
  std::size_t documents = 0;
  std::size_t distinct_terms = 0;
  double average_length = 0.0;
};

// Builds an index from XML batches and saves it. Throws SchemaError or
// DuplicateId naming the offending document.
IndexStats cmd_index(const std::vector<fs::path>& xml_batches, const fs::path& index_path,
                     const index::Bm25Params& params = {});

struct QueryOptions {
  std::string query;
  std::optional<std::string> category;
  std::size_t top_k = 10;
  std::optional<index::Bm25Params> params;
};

struct QueryResult {
  std::vector<index::SearchHit> hits;
  // One line per hit followed by "<n> hits".
  std::string rendered;
};

// Throws CorruptIndex or IoError when the index cannot be loaded.
QueryResult cmd_query(const fs::path& index_path, const QueryOptions& opts);
std::string format_hits(const index::InvertedIndex& idx, const std::vector<index::SearchHit>& hits);

} // namespace screenlens::pipeline
