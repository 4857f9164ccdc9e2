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

#include "screenlens/pipeline.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "screenlens/image_io.hpp"
#include "screenlens/utf8.hpp"

namespace screenlens::pipeline {
namespace {

constexpr std::string_view kSubject = "{subject}";
constexpr std::string_view kTimestamp = "{timestamp}";

std::string regex_escape(std::string_view s) {
  static const std::string special = R"(\^$.|?*+()[]{})";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Transcription files end in one line terminator that is not part of the text.
std::string read_transcription(const fs::path& path) {
  std::string text = read_text(path);
  if (text.ends_with('\n')) text.pop_back();
  if (text.ends_with('\r')) text.pop_back();
  return text;
}

void write_atomically(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::map<std::string, fs::path> text_files_by_stem(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::map<std::string, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      files.emplace(entry.path().stem().string(), entry.path());
  return files;
}

struct ImageOutcome {
  std::optional<docmodel::ScreenshotDocument> doc;
  std::string text;
  std::size_t segments = 0;
  std::size_t segment_failures = 0;
  bool banner_removed = false;
  std::string error;
};

ImageOutcome process_image(const fs::path& image, const PipelineConfig& config,
                           const FilenamePattern& pattern, const ocr::TextRecognizer& engine) {
  ImageOutcome out;
  try {
    const auto parsed = pattern.match(image.stem().string());
    if (!parsed) {
      out.error = "file name does not match pattern " + pattern.pattern();
      return out;
    }
    const auto raster = imaging::load_image(image);
    auto extracted = ocr::extract_text(raster, config.segmentation, engine, config.segment_failures);
    if (config.strip_banner) ocr::strip_banner(extracted, config.banner_rules);

    docmodel::ScreenshotDocument doc;
    doc.id = docmodel::make_id(parsed->subject, parsed->timestamp);
    doc.timestamp = parsed->timestamp;
    doc.text = extracted.full_text;
    doc.image_path = image.string();
    out.doc = std::move(doc);
    out.text = extracted.full_text;
    out.segments = extracted.segments.size() + extracted.failures.size();
    out.segment_failures = extracted.failures.size();
    out.banner_removed = extracted.banner_removed;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

} // namespace

FilenamePattern::FilenamePattern(std::string pattern) : pattern_(std::move(pattern)) {
  const auto s = pattern_.find(kSubject);
  const auto t = pattern_.find(kTimestamp);
  if (s == std::string::npos || t == std::string::npos ||
      pattern_.find(kSubject, s + 1) != std::string::npos ||
      pattern_.find(kTimestamp, t + 1) != std::string::npos)
    throw ConfigError("file name pattern must contain {subject} and {timestamp} once each: " +
                      pattern_);
  subject_first_ = s < t;
  const auto first = std::min(s, t);
  const auto second = std::max(s, t);
  const auto first_len = first == s ? kSubject.size() : kTimestamp.size();
  const auto second_len = second == s ? kSubject.size() : kTimestamp.size();
  auto group = [](bool subject) { return subject ? std::string("([^_]+)") : std::string(R"((\d{8}T\d{6}))"); };

  std::string re = regex_escape(std::string_view(pattern_).substr(0, first));
  re += group(first == s);
  re += regex_escape(std::string_view(pattern_).substr(first + first_len, second - first - first_len));
  re += group(second == s);
  re += regex_escape(std::string_view(pattern_).substr(second + second_len));
  regex_ = std::regex(re);
}

std::optional<FilenamePattern::Match> FilenamePattern::match(const std::string& stem) const {
  std::smatch m;
  if (!std::regex_match(stem, m, regex_)) return std::nullopt;
  const std::string subject = m[subject_first_ ? 1 : 2].str();
  const std::string stamp = m[subject_first_ ? 2 : 1].str();
  try {
    return Match{subject, docmodel::parse_timestamp(stamp)};
  } catch (const docmodel::TimestampError&) {
    return std::nullopt;
  }
}

void PipelineConfig::validate() const {
  if (!fs::is_directory(input_dir)) throw ConfigError("input directory does not exist: " + input_dir.string());
  if (output_dir.empty()) throw ConfigError("output directory not set");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  segmentation.validate();
  FilenamePattern{filename_pattern};
}

bool engine_available(const std::string& command_template) {
  // First word of the command, with shell quoting removed.
  std::string program;
  char quote = 0;
  for (char c : command_template) {
    if (quote) {
      if (c == quote) quote = 0;
      else program += c;
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == ' ' || c == '\t') {
      if (!program.empty()) break;
    } else {
      program += c;
    }
  }
  if (program.empty()) return false;
  if (program.find('/') != std::string::npos) return access(program.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  std::string dirs = path ? path : "/usr/bin:/bin";
  std::istringstream split(dirs);
  std::string dir;
  while (std::getline(split, dir, ':')) {
    if (dir.empty()) dir = ".";
    if (access((fs::path(dir) / program).c_str(), X_OK) == 0) return true;
  }
  return false;
}

ExtractSummary cmd_extract(const PipelineConfig& config, const ocr::TextRecognizer& engine) {
  config.validate();
  const FilenamePattern pattern(config.filename_pattern);
  fs::create_directories(config.output_dir);

  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(config.input_dir))
    if (entry.is_regular_file() && imaging::is_supported_image(entry.path()))
      images.push_back(entry.path());
  std::sort(images.begin(), images.end());

  std::vector<ImageOutcome> outcomes(images.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < images.size(); i = next++)
      outcomes[i] = process_image(images[i], config, pattern, engine);
  };
  {
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), images.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  // Single collector, in file-name order.
  ExtractSummary summary;
  summary.images = images.size();
  std::vector<docmodel::ScreenshotDocument> docs;
  std::map<std::string, std::size_t> seen_ids;
  for (std::size_t i = 0; i < images.size(); ++i) {
    auto& o = outcomes[i];
    if (o.doc && seen_ids.contains(o.doc->id)) {
      o.error = "duplicate document id " + o.doc->id + " (also " +
                images[seen_ids[o.doc->id]].filename().string() + ")";
      o.doc.reset();
    }
    if (!o.doc) {
      summary.failures.push_back({images[i], o.error});
      continue;
    }
    seen_ids.emplace(o.doc->id, i);
    summary.segments += o.segments;
    summary.segment_failures += o.segment_failures;
    summary.banners_removed += o.banner_removed ? 1 : 0;
    write_atomically(config.output_dir / (images[i].stem().string() + ".txt"), o.text + "\n");
    docs.push_back(std::move(*o.doc));
    ++summary.succeeded;
  }

  docs = docmodel::link_timeline(std::move(docs));
  summary.xml_path = config.output_dir / kBatchFileName;
  write_atomically(summary.xml_path, docmodel::to_xml(docs));
  return summary;
}

ExtractSummary cmd_extract(const PipelineConfig& config) {
  auto engine_cfg = config.engine;
  engine_cfg.max_concurrent = std::max(engine_cfg.max_concurrent, 1);
  engine_cfg.validate();
  if (!engine_available(engine_cfg.command_template))
    throw ConfigError("OCR engine not found for command: " + engine_cfg.command_template);
  const ocr::CommandEngine engine(engine_cfg);
  return cmd_extract(config, engine);
}

EvaluationOutcome cmd_evaluate(const fs::path& hyp_dir, const fs::path& ref_dir,
                               const metrics::NormalizeOptions& opts) {
  const auto hyps = text_files_by_stem(hyp_dir);
  const auto refs = text_files_by_stem(ref_dir);

  EvaluationOutcome out;
  std::vector<metrics::DocumentPair> pairs;
  for (const auto& [stem, ref_path] : refs) {
    const auto it = hyps.find(stem);
    if (it == hyps.end()) {
      out.unmatched_references.push_back(stem);
      continue;
    }
    pairs.push_back({stem, read_transcription(ref_path), read_transcription(it->second)});
  }
  for (const auto& [stem, _] : hyps)
    if (!refs.contains(stem)) out.unmatched_hypotheses.push_back(stem);

  out.report = metrics::evaluate_corpus(pairs, opts);
  return out;
}

long long rate_basis_points(double rate) { return std::llround(rate * 10000.0); }

std::string format_percent(long long bp) {
  const bool negative = bp < 0;
  const long long mag = negative ? -bp : bp;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld%%", negative ? "-" : "", mag / 100, mag % 100);
  return buf;
}

std::string format_table(const metrics::CorpusReport& report) {
  struct Row {
    std::string label;
    std::optional<double> cer, wer, per;
    std::string note;
  };
  std::vector<Row> rows;
  for (const auto& d : report.documents) {
    if (d.result)
      rows.push_back({d.id, d.result->cer, d.result->wer, d.result->per, {}});
    else
      rows.push_back({d.id, std::nullopt, std::nullopt, std::nullopt, d.error.value_or("error")});
  }
  rows.push_back({"Corpus (micro)", report.cer, report.wer, report.per, {}});

  std::size_t label_width = std::string_view("Document").size();
  for (const auto& r : rows) label_width = std::max(label_width, utf8::length(r.label));

  std::ostringstream out;
  auto cell = [&](const std::string& s) {
    out << " | " << std::string(s.size() < 9 ? 9 - s.size() : 0, ' ') << s;
  };
  auto pad_label = [&](const std::string& s) {
    out << s << std::string(label_width - utf8::length(s), ' ');
  };

  pad_label("");
  out << " | " << "   Character-level   " << " | " << "                 Word-level                 " << "\n";
  pad_label("Document");
  for (const char* h : {"ER", "Accuracy", "ER", "Accuracy", "PER", "Accuracy"}) cell(h);
  out << "\n" << std::string(label_width + 6 * 12, '-') << "\n";
  for (const auto& r : rows) {
    pad_label(r.label);
    for (const auto& rate : {r.cer, r.wer, r.per}) {
      if (rate) {
        const long long bp = rate_basis_points(*rate);
        cell(format_percent(bp));
        cell(format_percent(10000 - bp));
      } else {
        cell("n/a");
        cell("n/a");
      }
    }
    if (!r.note.empty()) out << "  (" << r.note << ")";
    out << "\n";
  }
  out << report.document_count() << " documents\n";
  return out.str();
}

nlohmann::json to_json(const EvaluationOutcome& outcome) {
  using nlohmann::json;
  auto counts = [](const metrics::EditCounts& c, std::size_t reference) {
    return json{{"insertions", c.insertions},
                {"substitutions", c.substitutions},
                {"deletions", c.deletions},
                {"reference", reference}};
  };
  auto rate = [](const std::optional<double>& r) -> json {
    if (!r) return nullptr;
    return json{{"error_rate", *r}, {"accuracy", 1.0 - *r}};
  };

  const auto& rep = outcome.report;
  json docs = json::array();
  for (const auto& d : rep.documents) {
    json j{{"id", d.id}};
    if (d.result) {
      j["characters"] = counts(d.result->chars, d.result->ref_chars);
      j["words"] = counts(d.result->words, d.result->ref_words);
      j["bag_errors"] = d.result->bag_errors;
      j["cer"] = rate(d.result->cer);
      j["wer"] = rate(d.result->wer);
      j["per"] = rate(d.result->per);
      j["error"] = nullptr;
    } else {
      for (const char* key : {"cer", "wer", "per"}) j[key] = nullptr;
      j["error"] = d.error.value_or("error");
    }
    docs.push_back(std::move(j));
  }
  return json{{"document_count", rep.document_count()},
              {"documents", std::move(docs)},
              {"corpus",
               {{"characters", counts(rep.chars, rep.ref_chars)},
                {"words", counts(rep.words, rep.ref_words)},
                {"bag_errors", rep.bag_errors},
                {"cer", rate(rep.cer)},
                {"wer", rate(rep.wer)},
                {"per", rate(rep.per)}}},
              {"unmatched",
               {{"hypotheses", outcome.unmatched_hypotheses},
                {"references", outcome.unmatched_references}}}};
}

IndexStats cmd_index(const std::vector<fs::path>& xml_batches, const fs::path& index_path,
                     const index::Bm25Params& params) {
  std::vector<docmodel::ScreenshotDocument> docs;
  for (const auto& batch : xml_batches) {
    auto parsed = docmodel::from_xml(read_text(batch));
    docs.insert(docs.end(), std::make_move_iterator(parsed.begin()),
                std::make_move_iterator(parsed.end()));
  }
  // Ids outside the <subject>_<time> scheme cannot take part in timelines.
  bool timeline_ids = true;
  for (const auto& d : docs) {
    try {
      docmodel::parse_id(d.id);
    } catch (const docmodel::SchemaError&) {
      timeline_ids = false;
    }
  }
  if (timeline_ids) docs = docmodel::resolve_image_paths(std::move(docs));

  index::InvertedIndex idx(params);
  for (auto& d : docs) idx.add_document(std::move(d));
  idx.save(index_path);
  return {idx.size(), idx.distinct_terms(), idx.average_length()};
}

std::string format_hits(const index::InvertedIndex& idx, const std::vector<index::SearchHit>& hits) {
  std::ostringstream out;
  for (const auto& h : hits) {
    const auto& d = idx.document(h.doc);
    std::string excerpt(utf8::prefix(d.text, 80));
    std::replace(excerpt.begin(), excerpt.end(), '\n', ' ');
    char score[32];
    std::snprintf(score, sizeof score, "%.6f", h.score);
    out << h.rank << ". " << h.id << "  score=" << score << "  "
        << docmodel::format_iso(d.timestamp);
    if (d.category) out << "  [" << *d.category << "]";
    out << "  " << excerpt << "\n";
  }
  out << hits.size() << (hits.size() == 1 ? " hit" : " hits") << "\n";
  return out.str();
}

QueryResult cmd_query(const fs::path& index_path, const QueryOptions& opts) {
  auto idx = index::InvertedIndex::load(index_path);
  if (opts.params) idx.set_params(*opts.params);
  QueryResult res;
  res.hits = idx.search(opts.query, opts.category, std::max<std::size_t>(opts.top_k, 1));
  res.rendered = format_hits(idx, res.hits);
  return res;
}

} // namespace screenlens::pipeline
