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

#include "screenlens/metrics.hpp"

#include <algorithm>
#include <map>

#include "screenlens/utf8.hpp"

namespace screenlens::metrics {
namespace {

double ratio(std::size_t errors, std::size_t reference) {
  if (reference == 0) {
    if (errors == 0) return 0.0;
    throw EmptyReference();
  }
  return static_cast<double>(errors) / static_cast<double>(reference);
}

std::optional<double> micro(std::size_t errors, std::size_t reference) {
  if (reference == 0) return std::nullopt;
  return static_cast<double>(errors) / static_cast<double>(reference);
}

} // namespace

std::string normalize(std::string_view text, const NormalizeOptions& opts) {
  if (!opts.fold_case && !opts.strip_punctuation) return std::string(text);
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : utf8::decode(text)) {
    if (opts.strip_punctuation && !utf8::is_alnum(cp) && !utf8::is_space(cp)) continue;
    utf8::append(out, opts.fold_case ? utf8::to_lower(cp) : cp);
  }
  return out;
}

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char32_t cp : utf8::decode(text)) {
    if (utf8::is_space(cp)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      utf8::append(current, cp);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::size_t bag_errors(std::span<const std::string> ref, std::span<const std::string> hyp) {
  std::map<std::string_view, std::size_t> ref_bag;
  for (const auto& w : ref) ++ref_bag[w];
  std::size_t matched = 0;
  for (const auto& w : hyp) {
    auto it = ref_bag.find(w);
    if (it != ref_bag.end() && it->second > 0) {
      --it->second;
      ++matched;
    }
  }
  return std::max(ref.size(), hyp.size()) - matched;
}

double cer(std::string_view ref, std::string_view hyp) {
  const auto r = utf8::decode(ref);
  const auto h = utf8::decode(hyp);
  return ratio(edit_counts(r, h).total(), r.size());
}

double wer(std::string_view ref, std::string_view hyp) {
  const auto r = tokenize_words(ref);
  const auto h = tokenize_words(hyp);
  return ratio(edit_counts(r, h).total(), r.size());
}

double per(std::string_view ref, std::string_view hyp) {
  const auto r = tokenize_words(ref);
  const auto h = tokenize_words(hyp);
  return ratio(bag_errors(r, h), r.size());
}

EvalResult evaluate_pair(std::string_view ref, std::string_view hyp, const NormalizeOptions& opts) {
  const std::string nref = normalize(ref, opts);
  const std::string nhyp = normalize(hyp, opts);

  EvalResult res;
  const auto rc = utf8::decode(nref);
  const auto hc = utf8::decode(nhyp);
  res.chars = edit_counts(rc, hc);
  res.ref_chars = rc.size();

  const auto rw = tokenize_words(nref);
  const auto hw = tokenize_words(nhyp);
  res.words = edit_counts(rw, hw);
  res.ref_words = rw.size();
  res.bag_errors = metrics::bag_errors(rw, hw);

  res.cer = ratio(res.chars.total(), res.ref_chars);
  res.wer = ratio(res.words.total(), res.ref_words);
  res.per = ratio(res.bag_errors, res.ref_words);
  return res;
}

CorpusReport evaluate_corpus(std::span<const DocumentPair> pairs, const NormalizeOptions& opts) {
  CorpusReport report;
  report.documents.reserve(pairs.size());
  for (const auto& p : pairs) {
    DocumentResult doc{p.id, std::nullopt, std::nullopt};
    try {
      EvalResult r = evaluate_pair(p.ref, p.hyp, opts);
      report.chars += r.chars;
      report.ref_chars += r.ref_chars;
      report.words += r.words;
      report.ref_words += r.ref_words;
      report.bag_errors += r.bag_errors;
      doc.result = r;
    } catch (const EmptyReference& e) {
      doc.error = e.what();
    }
    report.documents.push_back(std::move(doc));
  }
  report.cer = micro(report.chars.total(), report.ref_chars);
  report.wer = micro(report.words.total(), report.ref_words);
  report.per = micro(report.bag_errors, report.ref_words);
  return report;
}

} // namespace screenlens::metrics
