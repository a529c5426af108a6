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

#include "segtree/corpus.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "segtree/utf8.h"

namespace segtree {
namespace {

bool IsWhitespace(char32_t c) {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

std::string_view StripCarriageReturn(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::u32string DecodeOrThrow(std::string_view text, int line) {
  auto decoded = utf8::Decode(text);
  if (!decoded) throw FormatError("malformed UTF-8", line);
  return std::move(*decoded);
}

}  // namespace

Sentence::Sentence(std::u32string chars) : chars_(std::move(chars)) {
  for (char32_t c : chars_) {
    if (IsWhitespace(c)) throw FormatError("sentence contains whitespace");
  }
}

Sentence Sentence::FromUtf8(std::string_view text, int line) {
  auto chars = DecodeOrThrow(text, line);
  for (char32_t c : chars) {
    if (IsWhitespace(c)) throw FormatError("unexpected whitespace", line);
  }
  Sentence s;
  s.chars_ = std::move(chars);
  return s;
}

std::string Sentence::Text() const { return utf8::Encode(chars_); }

std::string Sentence::Substr(int begin, int end) const {
  return utf8::Encode(
      std::u32string_view(chars_).substr(begin - 1, end - begin + 1));
}

char TagName(Tag tag) {
  static constexpr char kNames[] = {'B', 'M', 'E', 'S'};
  return kNames[static_cast<int>(tag)];
}

Segmentation::Segmentation(Sentence sentence, std::vector<int> boundaries)
    : sentence_(std::move(sentence)), boundaries_(std::move(boundaries)) {
  std::sort(boundaries_.begin(), boundaries_.end());
  const int n = sentence_.size();
  for (size_t k = 0; k < boundaries_.size(); ++k) {
    if (boundaries_[k] < 1 || boundaries_[k] > n - 1) {
      throw ArgumentError("boundary gap " + std::to_string(boundaries_[k]) +
                          " outside [1, " + std::to_string(n - 1) + "]");
    }
    if (k > 0 && boundaries_[k] == boundaries_[k - 1]) {
      throw ArgumentError("duplicate boundary gap " +
                          std::to_string(boundaries_[k]));
    }
  }
}

Segmentation Segmentation::FromSpans(Sentence sentence,
                                     std::span<const Span> words) {
  std::vector<int> gaps;
  int expected = 1;
  for (const Span& w : words) {
    if (w.begin != expected || w.end < w.begin) {
      throw ArgumentError("word spans do not tile the sentence");
    }
    expected = w.end + 1;
    if (w.end < sentence.size()) gaps.push_back(w.end);
  }
  if (expected != sentence.size() + 1 && !(words.empty() && sentence.empty())) {
    throw ArgumentError("word spans do not cover the sentence");
  }
  return Segmentation(std::move(sentence), std::move(gaps));
}

bool Segmentation::HasBoundary(int gap) const {
  return std::binary_search(boundaries_.begin(), boundaries_.end(), gap);
}

std::vector<Span> Segmentation::WordSpans() const {
  std::vector<Span> spans;
  if (sentence_.empty()) return spans;
  spans.reserve(boundaries_.size() + 1);
  int begin = 1;
  for (int gap : boundaries_) {
    spans.push_back({begin, gap});
    begin = gap + 1;
  }
  spans.push_back({begin, sentence_.size()});
  return spans;
}

std::vector<std::string> Segmentation::Words() const {
  std::vector<std::string> words;
  for (const Span& s : WordSpans()) {
    words.push_back(sentence_.Substr(s.begin, s.end));
  }
  return words;
}

std::string Segmentation::ToLine() const {
  std::string line;
  for (const std::string& w : Words()) {
    if (!line.empty()) line.push_back(' ');
    line += w;
  }
  return line;
}

Segmentation ParseSegmentedLine(std::string_view line, int line_no) {
  line = StripCarriageReturn(line);
  std::u32string chars;
  std::vector<int> gaps;
  size_t pos = 0;
  while (pos < line.size()) {
    if (line[pos] == ' ') {
      ++pos;
      continue;
    }
    size_t end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    auto word = DecodeOrThrow(line.substr(pos, end - pos), line_no);
    for (char32_t c : word) {
      if (IsWhitespace(c)) throw FormatError("unexpected whitespace", line_no);
    }
    if (!chars.empty()) gaps.push_back(static_cast<int>(chars.size()));
    chars += word;
    pos = end;
  }
  return Segmentation(Sentence(std::move(chars)), std::move(gaps));
}

Sentence ParseRawLine(std::string_view line, int line_no) {
  line = StripCarriageReturn(line);
  std::string compact;
  compact.reserve(line.size());
  for (char ch : line) {
    if (ch != ' ') compact.push_back(ch);
  }
  return Sentence::FromUtf8(compact, line_no);
}

std::vector<Tag> SegmentationToTags(const Segmentation& seg) {
  std::vector<Tag> tags;
  tags.reserve(seg.sentence().size());
  for (const Span& w : seg.WordSpans()) {
    if (w.length() == 1) {
      tags.push_back(Tag::kS);
      continue;
    }
    tags.push_back(Tag::kB);
    for (int k = w.begin + 1; k < w.end; ++k) tags.push_back(Tag::kM);
    tags.push_back(Tag::kE);
  }
  return tags;
}

Segmentation TagsToSegmentation(const Sentence& sentence,
                                std::span<const Tag> tags) {
  if (static_cast<int>(tags.size()) != sentence.size()) {
    throw ArgumentError("tag sequence length differs from sentence length");
  }
  std::vector<int> gaps;
  for (int i = 1; i < sentence.size(); ++i) {
    const Tag t = tags[i - 1];
    if (t == Tag::kE || t == Tag::kS) gaps.push_back(i);
  }
  return Segmentation(sentence, std::move(gaps));
}

std::string Lexicon::BigramKey(std::string_view left, std::string_view right) {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key.append(left);
  key.push_back(' ');
  key.append(right);
  return key;
}

void Lexicon::AddWord(const std::string& word, int64_t count) {
  if (count <= 0) throw ArgumentError("lexicon counts must be positive");
  unigrams_[word] += count;
  total_words_ += count;
}

void Lexicon::AddBigram(const std::string& left, const std::string& right,
                        int64_t count) {
  if (count <= 0) throw ArgumentError("lexicon counts must be positive");
  bigrams_[BigramKey(left, right)] += count;
}

int64_t Lexicon::Count(std::string_view word) const {
  auto it = unigrams_.find(std::string(word));
  return it == unigrams_.end() ? 0 : it->second;
}

int64_t Lexicon::BigramCount(std::string_view left,
                             std::string_view right) const {
  auto it = bigrams_.find(BigramKey(left, right));
  return it == bigrams_.end() ? 0 : it->second;
}

std::vector<std::pair<std::string, int64_t>> Lexicon::SortedUnigrams() const {
  std::vector<std::pair<std::string, int64_t>> out(unigrams_.begin(),
                                                   unigrams_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::pair<std::string, std::string>, int64_t>>
Lexicon::SortedBigrams() const {
  std::vector<std::pair<std::pair<std::string, std::string>, int64_t>> out;
  out.reserve(bigrams_.size());
  for (const auto& [key, count] : bigrams_) {
    // Words never contain spaces, so the first space is the separator.
    const size_t sep = key.find(' ');
    out.push_back({{key.substr(0, sep), key.substr(sep + 1)}, count});
  }
  std::sort(out.begin(), out.end());
  return out;
}

Lexicon BuildLexicon(std::span<const Segmentation> corpus) {
  Lexicon lex;
  for (const Segmentation& seg : corpus) {
    const auto words = seg.Words();
    for (size_t k = 0; k < words.size(); ++k) {
      lex.AddWord(words[k]);
      if (k > 0) lex.AddBigram(words[k - 1], words[k]);
    }
  }
  return lex;
}

int64_t CharStats::CharCount(char32_t c) const {
  auto it = char_counts.find(c);
  return it == char_counts.end() ? 0 : it->second;
}

int64_t CharStats::BigramCount(char32_t a, char32_t b) const {
  auto it = char_bigram_counts.find(PairKey(a, b));
  return it == char_bigram_counts.end() ? 0 : it->second;
}

CharStats BuildCharStats(std::span<const Sentence> corpus) {
  CharStats stats;
  for (const Sentence& s : corpus) {
    if (s.empty()) continue;
    ++stats.num_sentences;
    const auto& chars = s.chars();
    for (size_t k = 0; k < chars.size(); ++k) {
      ++stats.char_counts[chars[k]];
      if (k > 0) {
        ++stats.char_bigram_counts[CharStats::PairKey(chars[k - 1], chars[k])];
        ++stats.total_bigrams;
      }
    }
    stats.total_chars += static_cast<int64_t>(chars.size());
  }
  return stats;
}

double OovRate(std::span<const Segmentation> test, const Lexicon& lex) {
  int64_t total = 0;
  int64_t oov = 0;
  for (const Segmentation& seg : test) {
    for (const std::string& w : seg.Words()) {
      ++total;
      if (!lex.Contains(w)) ++oov;
    }
  }
  if (total == 0) throw ArgumentError("OOV rate of an empty test set");
  return static_cast<double>(oov) / static_cast<double>(total);
}

std::vector<size_t> SeededPermutation(size_t n, uint64_t seed) {
  std::vector<size_t> order(n);
  for (size_t k = 0; k < n; ++k) order[k] = k;
  std::mt19937_64 rng(seed);
  for (size_t k = n; k > 1; --k) {
    const size_t j = static_cast<size_t>(rng() % k);
    std::swap(order[k - 1], order[j]);
  }
  return order;
}

std::vector<Sentence> SentencesOf(std::span<const Segmentation> corpus) {
  std::vector<Sentence> out;
  out.reserve(corpus.size());
  for (const Segmentation& seg : corpus) out.push_back(seg.sentence());
  return out;
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (in.bad()) throw IoError("error reading " + path);
  return lines;
}

void WriteText(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("error writing " + path);
}

std::vector<Segmentation> ReadSegmentedCorpus(const std::string& path,
                                              std::vector<int>* line_numbers) {
  std::vector<Segmentation> corpus;
  const auto lines = ReadLines(path);
  for (size_t k = 0; k < lines.size(); ++k) {
    const int line_no = static_cast<int>(k) + 1;
    Segmentation seg = ParseSegmentedLine(lines[k], line_no);
    if (seg.sentence().empty()) continue;
    corpus.push_back(std::move(seg));
    if (line_numbers) line_numbers->push_back(line_no);
  }
  return corpus;
}

std::vector<Sentence> ReadRawCorpus(const std::string& path,
                                    std::vector<int>* line_numbers) {
  std::vector<Sentence> corpus;
  const auto lines = ReadLines(path);
  for (size_t k = 0; k < lines.size(); ++k) {
    const int line_no = static_cast<int>(k) + 1;
    Sentence s = ParseRawLine(lines[k], line_no);
    if (s.empty()) continue;
    corpus.push_back(std::move(s));
    if (line_numbers) line_numbers->push_back(line_no);
  }
  return corpus;
}

std::vector<Sentence> ReadRawLines(const std::string& path) {
  std::vector<Sentence> corpus;
  const auto lines = ReadLines(path);
  corpus.reserve(lines.size());
  for (size_t k = 0; k < lines.size(); ++k) {
    corpus.push_back(ParseRawLine(lines[k], static_cast<int>(k) + 1));
  }
  return corpus;
}

}  // namespace segtree
