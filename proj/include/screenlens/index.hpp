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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "screenlens/docmodel.hpp"
#include "screenlens/error.hpp"

namespace screenlens::index {

using docmodel::ScreenshotDocument;
using DocOrdinal = std::uint32_t;

class CorruptIndex : public Error {
public:
  using Error::Error;
};

// Splits on runs of non-alphanumeric code points and lowercases. No
// stemming, no stopwords.
std::vector<std::string> analyze(std::string_view text);

struct Posting {
  DocOrdinal doc = 0;
  std::uint32_t frequency = 0;

  friend bool operator==(const Posting&, const Posting&) = default;
};

enum class Field { Text, Category };

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
  // Weight of the category-field score added to the text-field score.
  double category_boost = 3.0;

  friend bool operator==(const Bm25Params&, const Bm25Params&) = default;
};

struct SearchHit {
  std::string id;
  DocOrdinal doc = 0;
  double score = 0.0;
  std::size_t rank = 0;
  bool matched_text = false;
  bool matched_category = false;
};

struct Neighbors {
  std::optional<DocOrdinal> previous;
  std::optional<DocOrdinal> next;
};

// Two-field inverted index (OCR text and category label) scored with BM25.
// Building is single-writer; a fully built index can be read from any number
// of threads.
class InvertedIndex {
public:
  static constexpr std::uint32_t kFormatVersion = 1;

  explicit InvertedIndex(Bm25Params params = {});

  // Throws DuplicateId if the id is already indexed.
  DocOrdinal add_document(ScreenshotDocument doc);

  std::size_t size() const noexcept { return docs_.size(); }
  bool empty() const noexcept { return docs_.empty(); }
  const Bm25Params& params() const noexcept { return params_; }
  void set_params(const Bm25Params& params) noexcept { params_ = params; }

  const ScreenshotDocument& document(DocOrdinal doc) const { return docs_.at(doc); }
  std::optional<DocOrdinal> find(std::string_view id) const;

  // Token count of a document in `field`.
  std::size_t length(DocOrdinal doc, Field field = Field::Text) const;
  double average_length(Field field = Field::Text) const;
  std::size_t document_frequency(std::string_view term, Field field = Field::Text) const;
  std::span<const Posting> postings(std::string_view term, Field field = Field::Text) const;
  std::size_t distinct_terms(Field field = Field::Text) const;
  std::uint32_t term_frequency(DocOrdinal doc, std::string_view term,
                               Field field = Field::Text) const;

  // ln((N - n + 0.5) / (n + 0.5)); negative for terms in more than half the
  // documents.
  double idf(std::string_view term, Field field = Field::Text) const;

  // Sum over the query terms (duplicates included) of the BM25 term weight.
  double bm25(DocOrdinal doc, std::span<const std::string> terms, Field field = Field::Text) const;

  // Every document with at least one query-term posting in either field,
  // scored text + boost * category, sorted by score desc then id asc. A
  // category filter keeps only documents whose label analyses to the same
  // terms; with an empty query the filter label itself is the query.
  std::vector<SearchHit> rank(std::string_view query,
                              const std::optional<std::string>& category = std::nullopt) const;

  // First k entries of rank().
  std::vector<SearchHit> search(std::string_view query,
                                const std::optional<std::string>& category, std::size_t k) const;

  // Timeline neighbours of a document, resolved through its previous/next
  // image links.
  Neighbors neighbors(DocOrdinal doc) const;

  void save(const std::filesystem::path& path) const;
  std::string serialize() const;
  static InvertedIndex load(const std::filesystem::path& path);
  static InvertedIndex deserialize(std::string_view bytes);

private:
  struct FieldIndex {
    std::unordered_map<std::string, std::vector<Posting>> postings;
    std::vector<std::uint32_t> lengths;
    std::uint64_t total_length = 0;
  };

  const FieldIndex& field(Field f) const noexcept { return f == Field::Text ? text_ : category_; }
  void post(FieldIndex& fi, DocOrdinal doc, const std::vector<std::string>& terms);
  void register_document(DocOrdinal doc);
  double term_weight(double idf, std::uint32_t tf, std::uint32_t len, double avdl) const;
  bool category_matches(DocOrdinal doc, const std::vector<std::string>& filter) const;

  Bm25Params params_;
  std::vector<ScreenshotDocument> docs_;
  std::unordered_map<std::string, DocOrdinal> by_id_;
  std::unordered_map<std::string, DocOrdinal> by_image_;
  // subject -> ordinals sorted by (timestamp, id)
  std::map<std::string, std::vector<DocOrdinal>, std::less<>> timelines_;
  FieldIndex text_;
  FieldIndex category_;
};

} // namespace screenlens::index
