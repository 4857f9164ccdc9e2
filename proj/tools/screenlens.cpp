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

// screenlens: extract | evaluate | index | query | serve

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "screenlens/pipeline.hpp"
#include "screenlens/service.hpp"

namespace fs = std::filesystem;
namespace pl = screenlens::pipeline;

namespace {

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Screenshot text extraction, evaluation and search"};
  app.set_config("--config", "", "Flat key = value file holding any of the long options");
  app.require_subcommand(1);

  std::vector<std::string> input;
  std::string output;
  std::string ref_dir;
  std::string engine_cmd;
  bool no_banner_strip = false;
  std::string banner_rules;
  int parallel = 1;
  std::string pattern = "{subject}_{timestamp}";
  int timeout_ms = 30'000;
  bool abort_on_segment_failure = false;
  screenlens::imaging::SegmentationParams seg;
  screenlens::index::Bm25Params bm25;
  std::optional<double> k1, b, boost;
  std::size_t top_k = 10;
  std::string category;
  std::string index_path;
  std::string addr = "127.0.0.1:8080";
  std::string images;
  bool fold_case = false;
  bool strip_punct = false;

  app.add_option("--input", input, "Image directory (extract), hypothesis directory (evaluate) or XML batches (index)");
  app.add_option("--output", output, "Output directory (extract), JSON report (evaluate) or index file (index)");
  app.add_option("--ref", ref_dir, "Reference transcription directory (evaluate)");
  app.add_option("--engine-cmd", engine_cmd, "OCR command template with {input} and {output}");
  app.add_flag("--no-banner-strip", no_banner_strip, "Keep status-bar first lines");
  app.add_option("--banner-rules", banner_rules, "File of 'network = tok, ...' lines");
  app.add_option("--parallel", parallel, "Images processed concurrently")->check(CLI::PositiveNumber);
  app.add_option("--pattern", pattern, "File-name pattern with {subject} and {timestamp}");
  app.add_option("--timeout-ms", timeout_ms, "Per-segment OCR timeout")->check(CLI::PositiveNumber);
  app.add_flag("--abort-on-segment-failure", abort_on_segment_failure, "Fail the image on the first engine error");
  app.add_option("--kernel-width", seg.kernel_width, "Dilation kernel width");
  app.add_option("--kernel-height", seg.kernel_height, "Dilation kernel height");
  app.add_option("--iterations", seg.iterations, "Dilation iterations");
  app.add_option("--min-area", seg.min_area, "Smallest kept box area (px^2)");
  app.add_option("--min-width", seg.min_width, "Smallest kept box width");
  app.add_option("--min-height", seg.min_height, "Smallest kept box height");
  app.add_option("--k1", k1, "BM25 k1 (default 1.2)");
  app.add_option("--b", b, "BM25 b (default 0.75)");
  app.add_option("--boost", boost, "Category field boost (default 3.0)");
  app.add_option("--top-k", top_k, "Hits to print")->check(CLI::PositiveNumber);
  app.add_option("--category", category, "Category filter (query)");
  app.add_option("--index", index_path, "Index file (query, serve)");
  app.add_option("--addr", addr, "Listen address host:port (serve)");
  app.add_option("--images", images, "Screenshot directory (serve)");
  app.add_flag("--fold-case", fold_case, "Ignore case differences (diagnostic)");
  app.add_flag("--strip-punctuation", strip_punct, "Ignore punctuation (diagnostic)");

  auto* extract = app.add_subcommand("extract", "Segment, OCR and write <stem>.txt plus batch.xml");
  auto* evaluate = app.add_subcommand("evaluate", "CER/WER/PER of --input against --ref");
  auto* index = app.add_subcommand("index", "Build an index file from XML batches");
  auto* query = app.add_subcommand("query", "Search an index file");
  auto* serve = app.add_subcommand("serve", "HTTP search API");
  std::vector<std::string> query_words;
  query->add_option("terms", query_words, "Query text");
  for (auto* sub : {extract, evaluate, index, query, serve}) sub->fallthrough();

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? pl::kExitOk : pl::kExitFatal;
  }

  auto params = [&] {
    if (k1) bm25.k1 = *k1;
    if (b) bm25.b = *b;
    if (boost) bm25.category_boost = *boost;
    return bm25;
  };

  try {
    if (extract->parsed()) {
      if (input.size() != 1 || output.empty())
        throw screenlens::ConfigError("extract needs one --input directory and --output");
      pl::PipelineConfig cfg;
      cfg.input_dir = input.front();
      cfg.output_dir = output;
      cfg.segmentation = seg;
      if (!engine_cmd.empty()) cfg.engine.command_template = engine_cmd;
      cfg.engine.apply_env_override();
      cfg.engine.timeout = std::chrono::milliseconds(timeout_ms);
      cfg.engine.max_concurrent = parallel;
      cfg.strip_banner = !no_banner_strip;
      if (!banner_rules.empty()) cfg.banner_rules = screenlens::ocr::load_banner_rules(banner_rules);
      cfg.parallelism = parallel;
      cfg.filename_pattern = pattern;
      if (abort_on_segment_failure) cfg.segment_failures = screenlens::ocr::FailurePolicy::Abort;

      const auto summary = pl::cmd_extract(cfg);
      for (const auto& f : summary.failures)
        std::cerr << "failed: " << f.image.string() << ": " << f.message << "\n";
      std::cout << "images: " << summary.images << "  succeeded: " << summary.succeeded
                << "  failed: " << summary.failures.size() << "  segments: " << summary.segments
                << "  segment failures: " << summary.segment_failures
                << "  banners removed: " << summary.banners_removed << "\n"
                << "batch: " << summary.xml_path.string() << "\n";
      return summary.exit_code();
    }

    if (evaluate->parsed()) {
      if (input.size() != 1 || ref_dir.empty())
        throw screenlens::ConfigError("evaluate needs --input <hypothesis dir> and --ref <reference dir>");
      const auto outcome = pl::cmd_evaluate(input.front(), ref_dir, {fold_case, strip_punct});
      for (const auto& s : outcome.unmatched_hypotheses)
        std::cerr << "warning: no reference for " << s << "\n";
      for (const auto& s : outcome.unmatched_references)
        std::cerr << "warning: no hypothesis for " << s << "\n";
      std::cout << pl::format_table(outcome.report);
      const auto json = pl::to_json(outcome).dump(2);
      if (output.empty()) {
        std::cout << json << "\n";
      } else {
        std::ofstream(output) << json << "\n";
      }
      bool failures = false;
      for (const auto& d : outcome.report.documents) failures = failures || d.error.has_value();
      return failures ? pl::kExitPartial : pl::kExitOk;
    }

    if (index->parsed()) {
      if (input.empty() || output.empty())
        throw screenlens::ConfigError("index needs --input <batch.xml>... and --output <index file>");
      std::vector<fs::path> batches(input.begin(), input.end());
      const auto stats = pl::cmd_index(batches, output, params());
      std::cout << "documents: " << stats.documents << "  distinct terms: " << stats.distinct_terms
                << "  avdl: " << stats.average_length << "\n";
      return pl::kExitOk;
    }

    if (query->parsed()) {
      if (index_path.empty()) throw screenlens::ConfigError("query needs --index");
      pl::QueryOptions opts;
      opts.query = join(query_words);
      if (!category.empty()) opts.category = category;
      opts.top_k = top_k;
      if (k1 || b || boost) {
        // Overrides apply on top of the parameters stored in the index.
        const auto stored = screenlens::index::InvertedIndex::load(index_path).params();
        bm25 = stored;
        opts.params = params();
      }
      std::cout << pl::cmd_query(index_path, opts).rendered;
      return pl::kExitOk;
    }

    if (serve->parsed()) {
      if (index_path.empty()) throw screenlens::ConfigError("serve needs --index");
      screenlens::service::ServeOptions opts;
      opts.index_path = index_path;
      std::tie(opts.host, opts.port) = screenlens::service::parse_address(addr);
      opts.images_dir = images;
      std::cerr << "listening on " << opts.host << ":" << opts.port << "\n";
      screenlens::service::serve(opts);
      return pl::kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pl::kExitFatal;
  }
  return pl::kExitFatal;
}
