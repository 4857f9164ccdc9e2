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

#include "screenlens/index.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "screenlens/utf8.hpp"

namespace screenlens::index {

std::vector<std::string> analyze(std::string_view text) {
  std::vector<std::string> terms;
  std::string current;
  for (char32_t cp : utf8::decode(text)) {
    if (utf8::is_alnum(cp)) {
      utf8::append(current, utf8::to_lower(cp));
    } else if (!current.empty()) {
      terms.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) terms.push_back(std::move(current));
  return terms;
}

InvertedIndex::InvertedIndex(Bm25Params params) : params_(params) {}

void InvertedIndex::post(FieldIndex& fi, DocOrdinal doc, const std::vector<std::string>& terms) {
  for (const auto& t : terms) {
    auto& list = fi.postings[t];
    if (list.empty() || list.back().doc != doc)
      list.push_back({doc, 1});
    else
      ++list.back().frequency;
  }
  fi.lengths.push_back(static_cast<std::uint32_t>(terms.size()));
  fi.total_length += terms.size();
}

void InvertedIndex::register_document(DocOrdinal doc) {
  const auto& d = docs_[doc];
  by_id_.emplace(d.id, doc);
  if (!d.image_path.empty()) by_image_.emplace(d.image_path, doc);

  std::string subject = d.id;
  try {
    subject = docmodel::parse_id(d.id).subject;
  } catch (const docmodel::SchemaError&) {
    // ids outside the <subject>_<time> scheme form their own timeline
  }
  auto& line = timelines_[subject];
  const auto pos = std::upper_bound(line.begin(), line.end(), doc, [&](DocOrdinal a, DocOrdinal b) {
    if (docs_[a].timestamp != docs_[b].timestamp) return docs_[a].timestamp < docs_[b].timestamp;
    return docs_[a].id < docs_[b].id;
  });
  line.insert(pos, doc);
}

DocOrdinal InvertedIndex::add_document(ScreenshotDocument doc) {
  if (by_id_.contains(doc.id)) throw DuplicateId(doc.id);
  const auto ordinal = static_cast<DocOrdinal>(docs_.size());
  post(text_, ordinal, analyze(doc.text));
  post(category_, ordinal, doc.category ? analyze(*doc.category) : std::vector<std::string>{});
  docs_.push_back(std::move(doc));
  register_document(ordinal);
  return ordinal;
}

std::optional<DocOrdinal> InvertedIndex::find(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t InvertedIndex::length(DocOrdinal doc, Field f) const { return field(f).lengths.at(doc); }

double InvertedIndex::average_length(Field f) const {
  if (docs_.empty()) return 0.0;
  return static_cast<double>(field(f).total_length) / static_cast<double>(docs_.size());
}

std::span<const Posting> InvertedIndex::postings(std::string_view term, Field f) const {
  const auto& map = field(f).postings;
  const auto it = map.find(std::string(term));
  if (it == map.end()) return {};
  return it->second;
}

std::size_t InvertedIndex::document_frequency(std::string_view term, Field f) const {
  return postings(term, f).size();
}

std::size_t InvertedIndex::distinct_terms(Field f) const { return field(f).postings.size(); }

std::uint32_t InvertedIndex::term_frequency(DocOrdinal doc, std::string_view term, Field f) const {
  const auto list = postings(term, f);
  const auto it = std::lower_bound(list.begin(), list.end(), doc,
                                   [](const Posting& p, DocOrdinal d) { return p.doc < d; });
  return it != list.end() && it->doc == doc ? it->frequency : 0;
}

double InvertedIndex::idf(std::string_view term, Field f) const {
  const double n = static_cast<double>(document_frequency(term, f));
  const double total = static_cast<double>(docs_.size());
  return std::log((total - n + 0.5) / (n + 0.5));
}

double InvertedIndex::term_weight(double idf, std::uint32_t tf, std::uint32_t len,
                                  double avdl) const {
  if (tf == 0 || avdl <= 0.0) return 0.0;
  const double f = tf;
  const double norm = params_.k1 * (1.0 - params_.b + params_.b * len / avdl);
  return idf * f * (params_.k1 + 1.0) / (f + norm);
}

double InvertedIndex::bm25(DocOrdinal doc, std::span<const std::string> terms, Field f) const {
  const double avdl = average_length(f);
  const auto len = static_cast<std::uint32_t>(length(doc, f));
  double score = 0.0;
  for (const auto& t : terms) score += term_weight(idf(t, f), term_frequency(doc, t, f), len, avdl);
  return score;
}

bool InvertedIndex::category_matches(DocOrdinal doc, const std::vector<std::string>& filter) const {
  const auto& cat = docs_[doc].category;
  return cat && analyze(*cat) == filter;
}

std::vector<SearchHit> InvertedIndex::rank(std::string_view query,
                                           const std::optional<std::string>& category) const {
  std::vector<std::string> terms = analyze(query);
  std::optional<std::vector<std::string>> filter;
  if (category) {
    filter = analyze(*category);
    if (terms.empty()) terms = *filter;
  }
  if (terms.empty() || docs_.empty()) return {};

  struct Accum {
    double text = 0.0;
    double category = 0.0;
    bool in_text = false;
    bool in_category = false;
  };
  std::unordered_map<DocOrdinal, Accum> acc;

  for (Field f : {Field::Text, Field::Category}) {
    const double avdl = average_length(f);
    const auto& fi = field(f);
    for (const auto& t : terms) {
      const auto list = postings(t, f);
      if (list.empty()) continue;
      const double w = idf(t, f);
      for (const auto& p : list) {
        auto& a = acc[p.doc];
        const double contrib = term_weight(w, p.frequency, fi.lengths[p.doc], avdl);
        if (f == Field::Text) {
          a.text += contrib;
          a.in_text = true;
        } else {
          a.category += contrib;
          a.in_category = true;
        }
      }
    }
  }

  std::vector<SearchHit> hits;
  hits.reserve(acc.size());
  for (const auto& [doc, a] : acc) {
    if (filter && !category_matches(doc, *filter)) continue;
    hits.push_back({docs_[doc].id, doc, a.text + params_.category_boost * a.category, 0, a.in_text,
                    a.in_category});
  }
  std::sort(hits.begin(), hits.end(), [](const SearchHit& x, const SearchHit& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.id < y.id;
  });
  for (std::size_t i = 0; i < hits.size(); ++i) hits[i].rank = i + 1;
  return hits;
}

std::vector<SearchHit> InvertedIndex::search(std::string_view query,
                                             const std::optional<std::string>& category,
                                             std::size_t k) const {
  auto hits = rank(query, category);
  if (hits.size() > k) hits.resize(k);
  return hits;
}

Neighbors InvertedIndex::neighbors(DocOrdinal doc) const {
  const auto& d = docs_.at(doc);
  std::string subject = d.id;
  try {
    subject = docmodel::parse_id(d.id).subject;
  } catch (const docmodel::SchemaError&) {
  }
  const auto& line = timelines_.find(subject)->second;
  const auto pos = static_cast<std::size_t>(std::find(line.begin(), line.end(), doc) - line.begin());

  auto resolve = [&](const std::optional<std::string>& link,
                     std::optional<std::size_t> fallback) -> std::optional<DocOrdinal> {
    if (!link) return std::nullopt;
    if (const auto it = by_image_.find(*link); it != by_image_.end()) return it->second;
    if (fallback) return line[*fallback];
    return std::nullopt;
  };
  Neighbors n;
  n.previous = resolve(d.previous_image, pos > 0 ? std::optional(pos - 1) : std::nullopt);
  n.next = resolve(d.next_image, pos + 1 < line.size() ? std::optional(pos + 1) : std::nullopt);
  return n;
}

} // namespace screenlens::index
