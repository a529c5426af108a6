// Copyright 2026 The Segtree Authors.
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

// Word-level precision/recall/F and the tree-based error breakdown.

#ifndef SEGTREE_ANALYSIS_H_
#define SEGTREE_ANALYSIS_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "segtree/boundary.h"
#include "segtree/corpus.h"
#include "segtree/pruning.h"

namespace segtree {

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  int64_t correct_words = 0;
  int64_t output_words = 0;
  int64_t gold_words = 0;
  double oov_rate = 0.0;

  bool operator==(const EvalReport&) const = default;
};

// Throws FormatError naming the gold line (1-based, or `gold_lines[k]` when
// given) of the first sentence pair whose characters differ.
void CheckAligned(std::span<const Segmentation> output,
                  std::span<const Segmentation> gold,
                  std::span<const int> gold_lines = {});

// A word is correct when its exact span occurs in the gold segmentation of
// the same sentence. `lex` (optional) is the training lexicon for the OOV
// rate of the gold words.
EvalReport Evaluate(std::span<const Segmentation> output,
                    std::span<const Segmentation> gold,
                    const Lexicon* lex = nullptr);

enum class ErrorKind : int { kTree = 0, kOverPruning = 1, kLessPruning = 2 };
inline constexpr int kNumErrorKinds = 3;
std::string_view ErrorKindName(ErrorKind kind);

struct ErrorBreakdown {
  // counts[kind][0] = IV, counts[kind][1] = OOV.
  std::array<std::array<int64_t, 2>, kNumErrorKinds> counts{};

  int64_t& at(ErrorKind kind, bool oov) {
    return counts[static_cast<int>(kind)][oov ? 1 : 0];
  }
  int64_t at(ErrorKind kind, bool oov) const {
    return counts[static_cast<int>(kind)][oov ? 1 : 0];
  }
  int64_t KindTotal(ErrorKind kind) const {
    return at(kind, false) + at(kind, true);
  }
  int64_t Total() const;
  ErrorBreakdown& operator+=(const ErrorBreakdown& other);
  bool operator==(const ErrorBreakdown&) const = default;
};

// Classifies one gold word that the output missed.
ErrorKind ClassifyMissedWord(const SpanSet& tree_spans,
                             std::span<const Span> output_words,
                             const Span& gold_word);

// For every gold word absent from the output: a tree error if its span is
// not a node of the tree built from `scores`; an over-pruning error if the
// output word covering its first character strictly contains it; a
// less-pruning error otherwise. IV/OOV is judged against `lex`.
ErrorBreakdown ClassifyErrors(const BoundaryScores& scores,
                              const Segmentation& output,
                              const Segmentation& gold, const Lexicon& lex);
ErrorBreakdown ClassifyErrors(std::span<const BoundaryScores> scores,
                              std::span<const Segmentation> output,
                              std::span<const Segmentation> gold,
                              const Lexicon& lex);

// Gold words whose spans are missing from `output` (same sentence).
std::vector<Span> MissedGoldWords(const Segmentation& output,
                                  const Segmentation& gold);

// Evaluation of oracle pruning on the trees built from `scores`.
EvalReport OracleBound(std::span<const BoundaryScores> scores,
                       std::span<const Segmentation> gold, Strategy strategy,
                       const Lexicon* lex = nullptr);

// 0.962 -> "96.2".
std::string FormatPercent(double fraction);

// Human-readable summary; `breakdown` may be null.
std::string RenderReport(const EvalReport& report,
                         const ErrorBreakdown* breakdown = nullptr);
std::string RenderBreakdown(const ErrorBreakdown& breakdown);

struct CsvRow {
  std::string corpus;
  std::string strategy;
  std::string predicate;
  EvalReport report;
  ErrorBreakdown breakdown;
};

// Header plus one line per row; fractions are written as percentages with
// one decimal.
std::string RenderCsv(std::span<const CsvRow> rows);
// Inverse of RenderCsv at the rendered precision. Word counts are not part
// of the schema and parse as zero.
std::vector<CsvRow> ParseCsv(std::string_view text);

}  // namespace segtree

#endif  // SEGTREE_ANALYSIS_H_
