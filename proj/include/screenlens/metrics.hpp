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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "screenlens/error.hpp"

namespace screenlens::metrics {

// Raised when a rate would be normalised by an empty reference while the
// hypothesis is not empty.
class EmptyReference : public Error {
public:
  EmptyReference() : Error("reference text is empty") {}
};

// Operations turning the hypothesis into the reference: an insertion adds a
// reference token the hypothesis lacks, a deletion drops a surplus
// hypothesis token.
struct EditCounts {
  std::size_t insertions = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;

  std::size_t total() const noexcept { return insertions + substitutions + deletions; }
  EditCounts& operator+=(const EditCounts& o) noexcept {
    insertions += o.insertions;
    substitutions += o.substitutions;
    deletions += o.deletions;
    return *this;
  }
  friend bool operator==(const EditCounts&, const EditCounts&) = default;
};

// Minimum unit-cost alignment. Among equal-cost alignments the backtrace
// prefers, at every step, match/substitution, then insertion, then deletion.
template <typename T>
EditCounts edit_counts(std::span<const T> ref, std::span<const T> hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const std::size_t stride = m + 1;
  // cost[i * stride + j] = distance between ref[0, i) and hyp[0, j)
  std::vector<std::size_t> cost((n + 1) * stride);
  for (std::size_t j = 0; j <= m; ++j) cost[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cost[i * stride] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = cost[(i - 1) * stride + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const std::size_t up = cost[(i - 1) * stride + j] + 1;
      const std::size_t left = cost[i * stride + j - 1] + 1;
      cost[i * stride + j] = std::min(diag, std::min(up, left));
    }
  }

  EditCounts counts;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = cost[i * stride + j];
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (cost[(i - 1) * stride + j - 1] + (same ? 0 : 1) == here) {
        if (!same) ++counts.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && cost[(i - 1) * stride + j] + 1 == here) {
      ++counts.insertions;
      --i;
    } else {
      ++counts.deletions;
      --j;
    }
  }
  return counts;
}

template <typename Seq>
EditCounts edit_counts(const Seq& ref, const Seq& hyp) {
  using T = typename Seq::value_type;
  return edit_counts<T>(std::span<const T>(ref.data(), ref.size()),
                        std::span<const T>(hyp.data(), hyp.size()));
}

// Diagnostic-only normalisation. Both flags off by default, so case and
// punctuation differences count as errors.
struct NormalizeOptions {
  bool fold_case = false;
  bool strip_punctuation = false;
};

std::string normalize(std::string_view text, const NormalizeOptions& opts);

// Splits on runs of Unicode whitespace; punctuation stays on its word.
std::vector<std::string> tokenize_words(std::string_view text);

// Character error rate over Unicode scalar values.
double cer(std::string_view ref, std::string_view hyp);
double wer(std::string_view ref, std::string_view hyp);
// Bag-of-words error: (max(|ref|, |hyp|) - matched) / |ref|.
double per(std::string_view ref, std::string_view hyp);

// Unordered word errors between two token lists.
std::size_t bag_errors(std::span<const std::string> ref, std::span<const std::string> hyp);

struct EvalResult {
  EditCounts chars;
  std::size_t ref_chars = 0;
  EditCounts words;
  std::size_t ref_words = 0;
  std::size_t bag_errors = 0;
  double cer = 0.0;
  double wer = 0.0;
  double per = 0.0;
};

EvalResult evaluate_pair(std::string_view ref, std::string_view hyp,
                         const NormalizeOptions& opts = {});

struct DocumentPair {
  std::string id;
  std::string ref;
  std::string hyp;
};

struct DocumentResult {
  std::string id;
  std::optional<EvalResult> result;
  std::optional<std::string> error;
};

struct CorpusReport {
  std::vector<DocumentResult> documents;
  EditCounts chars;
  std::size_t ref_chars = 0;
  EditCounts words;
  std::size_t ref_words = 0;
  std::size_t bag_errors = 0;
  // Micro averages; absent when no document contributed a reference length.
  std::optional<double> cer;
  std::optional<double> wer;
  std::optional<double> per;

  std::size_t document_count() const noexcept { return documents.size(); }
};

// Per-document failures are recorded in the report rather than thrown.
CorpusReport evaluate_corpus(std::span<const DocumentPair> pairs,
                             const NormalizeOptions& opts = {});

} // namespace screenlens::metrics
