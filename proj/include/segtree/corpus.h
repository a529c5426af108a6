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

// Sentences, segmentations and corpus-level statistics.
//
// Positions follow the usual 1-based convention: a sentence is c_1 ... c_n,
// and gap i (1 <= i <= n-1) sits between c_i and c_{i+1}. Spans are 1-based
// and inclusive on both ends.

#ifndef SEGTREE_CORPUS_H_
#define SEGTREE_CORPUS_H_

#include <array>
#include <compare>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "segtree/errors.h"

namespace segtree {

// A sequence of Unicode scalar values without whitespace.
class Sentence {
 public:
  Sentence() = default;
  explicit Sentence(std::u32string chars);

  // Decodes UTF-8 text; throws FormatError on invalid input or whitespace.
  static Sentence FromUtf8(std::string_view text, int line = 0);

  const std::u32string& chars() const { return chars_; }
  int size() const { return static_cast<int>(chars_.size()); }
  bool empty() const { return chars_.empty(); }
  char32_t at(int pos) const { return chars_[pos - 1]; }  // 1-based

  std::string Text() const;
  // Characters c_begin ... c_end (1-based, inclusive) as UTF-8.
  std::string Substr(int begin, int end) const;

  bool operator==(const Sentence&) const = default;

 private:
  std::u32string chars_;
};

struct Span {
  int begin = 1;  // 1-based, inclusive
  int end = 1;    // 1-based, inclusive

  int length() const { return end - begin + 1; }
  bool Contains(const Span& other) const {
    return begin <= other.begin && other.end <= end;
  }
  auto operator<=>(const Span&) const = default;
};

enum class Tag : int { kB = 0, kM = 1, kE = 2, kS = 3 };
inline constexpr int kNumTags = 4;
char TagName(Tag tag);

// A sentence plus the set of gaps that are word boundaries.
class Segmentation {
 public:
  Segmentation() = default;
  // `boundaries` may be unsorted; duplicates and out-of-range gaps throw.
  Segmentation(Sentence sentence, std::vector<int> boundaries);

  static Segmentation FromSpans(Sentence sentence, std::span<const Span> words);

  const Sentence& sentence() const { return sentence_; }
  const std::vector<int>& boundaries() const { return boundaries_; }

  bool HasBoundary(int gap) const;
  std::vector<Span> WordSpans() const;
  std::vector<std::string> Words() const;
  int num_words() const {
    return sentence_.empty() ? 0 : static_cast<int>(boundaries_.size()) + 1;
  }

  // Words joined by single spaces.
  std::string ToLine() const;

  bool operator==(const Segmentation&) const = default;

 private:
  Sentence sentence_;
  std::vector<int> boundaries_;  // sorted, unique, within [1, n-1]
};

// Parses one line of a segmented corpus. Words are separated by runs of
// ASCII spaces; a trailing '\r' is tolerated. Throws FormatError citing
// `line` on malformed UTF-8 or other whitespace.
Segmentation ParseSegmentedLine(std::string_view line, int line_no = 0);

// Parses a raw line; any ASCII spaces are dropped.
Sentence ParseRawLine(std::string_view line, int line_no = 0);

std::vector<Tag> SegmentationToTags(const Segmentation& seg);
// Inverse of SegmentationToTags. A word ends at c_i iff tag_i is E or S.
Segmentation TagsToSegmentation(const Sentence& sentence,
                                std::span<const Tag> tags);

// Word unigram and adjacent-word bigram counts.
class Lexicon {
 public:
  void AddWord(const std::string& word, int64_t count = 1);
  void AddBigram(const std::string& left, const std::string& right,
                 int64_t count = 1);

  int64_t Count(std::string_view word) const;
  int64_t BigramCount(std::string_view left, std::string_view right) const;
  bool Contains(std::string_view word) const { return Count(word) > 0; }
  bool ContainsBigram(std::string_view left, std::string_view right) const {
    return BigramCount(left, right) > 0;
  }

  int64_t total_words() const { return total_words_; }
  size_t num_unigrams() const { return unigrams_.size(); }
  size_t num_bigrams() const { return bigrams_.size(); }

  // Sorted views, for serialization.
  std::vector<std::pair<std::string, int64_t>> SortedUnigrams() const;
  std::vector<std::pair<std::pair<std::string, std::string>, int64_t>>
  SortedBigrams() const;

 private:
  static std::string BigramKey(std::string_view left, std::string_view right);

  std::unordered_map<std::string, int64_t> unigrams_;
  std::unordered_map<std::string, int64_t> bigrams_;  // "left right"
  int64_t total_words_ = 0;
};

Lexicon BuildLexicon(std::span<const Segmentation> corpus);

// Character and adjacent-character counts.
struct CharStats {
  std::unordered_map<char32_t, int64_t> char_counts;
  std::unordered_map<uint64_t, int64_t> char_bigram_counts;
  int64_t total_chars = 0;
  int64_t total_bigrams = 0;
  int64_t num_sentences = 0;

  static uint64_t PairKey(char32_t a, char32_t b) {
    return (static_cast<uint64_t>(a) << 32) | b;
  }
  int64_t CharCount(char32_t c) const;
  int64_t BigramCount(char32_t a, char32_t b) const;
};

CharStats BuildCharStats(std::span<const Sentence> corpus);

// Fraction of word tokens in `test` absent from `lex`'s unigrams.
// Throws ArgumentError when `test` holds no words.
double OovRate(std::span<const Segmentation> test, const Lexicon& lex);

// A seeded permutation of [0, n). Uses mt19937_64 and an explicit
// Fisher-Yates pass so that results do not depend on the standard library.
std::vector<size_t> SeededPermutation(size_t n, uint64_t seed);

// Splits `corpus` into a first part of floor(ratio * N) items and the rest,
// after a seeded shuffle. Throws ArgumentError unless 0 < ratio < 1.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> SplitCorpus(std::span<const T> corpus,
                                                      double ratio,
                                                      uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ArgumentError("split ratio must lie strictly between 0 and 1");
  }
  const auto order = SeededPermutation(corpus.size(), seed);
  const auto first_size =
      static_cast<size_t>(ratio * static_cast<double>(corpus.size()));
  std::pair<std::vector<T>, std::vector<T>> parts;
  parts.first.reserve(first_size);
  parts.second.reserve(corpus.size() - first_size);
  for (size_t k = 0; k < order.size(); ++k) {
    (k < first_size ? parts.first : parts.second).push_back(corpus[order[k]]);
  }
  return parts;
}

template <typename T>
std::pair<std::vector<T>, std::vector<T>> SplitCorpus(
    const std::vector<T>& corpus, double ratio, uint64_t seed) {
  return SplitCorpus(std::span<const T>(corpus), ratio, seed);
}

std::vector<Sentence> SentencesOf(std::span<const Segmentation> corpus);

// File readers. Empty lines are skipped but still advance the line counter;
// `line_numbers`, when given, receives the source line of each item.
std::vector<Segmentation> ReadSegmentedCorpus(
    const std::string& path, std::vector<int>* line_numbers = nullptr);
std::vector<Sentence> ReadRawCorpus(const std::string& path,
                                    std::vector<int>* line_numbers = nullptr);
// Every line, including empty ones (as empty sentences).
std::vector<Sentence> ReadRawLines(const std::string& path);

std::vector<std::string> ReadLines(const std::string& path);
void WriteText(const std::string& path, std::string_view text);

}  // namespace segtree

#endif  // SEGTREE_CORPUS_H_
