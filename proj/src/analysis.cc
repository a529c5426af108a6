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

#include "segtree/analysis.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "segtree/tree.h"

namespace segtree {
namespace {

constexpr std::array<std::string_view, 13> kCsvColumns = {
    "corpus",  "strategy", "predicate", "precision", "recall",
    "f",       "oov_rate", "tree_iv",   "tree_oov",  "over_iv",
    "over_oov", "less_iv", "less_oov"};

double Ratio(int64_t num, int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void FillRates(EvalReport* r) {
  r->precision = Ratio(r->correct_words, r->output_words);
  r->recall = Ratio(r->correct_words, r->gold_words);
  const double sum = r->precision + r->recall;
  r->f_measure = sum > 0 ? 2 * r->precision * r->recall / sum : 0.0;
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        field.push_back('"');
        ++k;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string CsvField(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

double ParsePercent(const std::string& field, int line) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw FormatError("bad percentage '" + field + "'", line);
  }
  return value / 100.0;
}

int64_t ParseCount(const std::string& field, int line) {
  int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw FormatError("bad count '" + field + "'", line);
  }
  return value;
}

}  // namespace

void CheckAligned(std::span<const Segmentation> output,
                  std::span<const Segmentation> gold,
                  std::span<const int> gold_lines) {
  auto line_of = [&](size_t k) {
    return k < gold_lines.size() ? gold_lines[k] : static_cast<int>(k) + 1;
  };
  const size_t common = std::min(output.size(), gold.size());
  for (size_t k = 0; k < common; ++k) {
    if (!(output[k].sentence() == gold[k].sentence())) {
      throw FormatError("output sentence differs from gold sentence",
                        line_of(k));
    }
  }
  if (output.size() != gold.size()) {
    throw FormatError("output has " + std::to_string(output.size()) +
                          " sentences, gold has " + std::to_string(gold.size()),
                      line_of(common));
  }
}

EvalReport Evaluate(std::span<const Segmentation> output,
                    std::span<const Segmentation> gold, const Lexicon* lex) {
  CheckAligned(output, gold);
  EvalReport r;
  int64_t oov = 0;
  for (size_t k = 0; k < gold.size(); ++k) {
    const auto out_spans = output[k].WordSpans();
    const auto gold_spans = gold[k].WordSpans();
    const std::set<Span> gold_set(gold_spans.begin(), gold_spans.end());
    r.output_words += static_cast<int64_t>(out_spans.size());
    r.gold_words += static_cast<int64_t>(gold_spans.size());
    for (const Span& s : out_spans) {
      if (gold_set.count(s)) ++r.correct_words;
    }
    if (lex) {
      for (const std::string& w : gold[k].Words()) {
        if (!lex->Contains(w)) ++oov;
      }
    }
  }
  FillRates(&r);
  r.oov_rate = lex ? Ratio(oov, r.gold_words) : 0.0;
  return r;
}

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTree:
      return "tree error";
    case ErrorKind::kOverPruning:
      return "over-pruning";
    case ErrorKind::kLessPruning:
      return "less-pruning";
  }
  return "";
}

int64_t ErrorBreakdown::Total() const {
  int64_t total = 0;
  for (const auto& row : counts) total += row[0] + row[1];
  return total;
}

ErrorBreakdown& ErrorBreakdown::operator+=(const ErrorBreakdown& other) {
  for (int k = 0; k < kNumErrorKinds; ++k) {
    counts[k][0] += other.counts[k][0];
    counts[k][1] += other.counts[k][1];
  }
  return *this;
}

ErrorKind ClassifyMissedWord(const SpanSet& tree_spans,
                             std::span<const Span> output_words,
                             const Span& gold_word) {
  if (!tree_spans.count(gold_word)) return ErrorKind::kTree;
  for (const Span& w : output_words) {
    if (w.begin <= gold_word.begin && gold_word.begin <= w.end) {
      return w.Contains(gold_word) && !(w == gold_word)
                 ? ErrorKind::kOverPruning
                 : ErrorKind::kLessPruning;
    }
  }
  return ErrorKind::kLessPruning;
}

std::vector<Span> MissedGoldWords(const Segmentation& output,
                                  const Segmentation& gold) {
  const auto out_spans = output.WordSpans();
  const std::set<Span> out_set(out_spans.begin(), out_spans.end());
  std::vector<Span> missed;
  for (const Span& g : gold.WordSpans()) {
    if (!out_set.count(g)) missed.push_back(g);
  }
  return missed;
}

ErrorBreakdown ClassifyErrors(const BoundaryScores& scores,
                              const Segmentation& output,
                              const Segmentation& gold, const Lexicon& lex) {
  ErrorBreakdown breakdown;
  if (!(scores.sentence == gold.sentence()) ||
      !(output.sentence() == gold.sentence())) {
    throw ArgumentError("scores, output and gold are not aligned");
  }
  if (gold.sentence().empty()) return breakdown;
  const auto missed = MissedGoldWords(output, gold);
  if (missed.empty()) return breakdown;
  const SpanSet tree_spans = NodeSpans(SegTree::Build(scores));
  const auto out_spans = output.WordSpans();
  for (const Span& g : missed) {
    const ErrorKind kind = ClassifyMissedWord(tree_spans, out_spans, g);
    const bool oov = !lex.Contains(gold.sentence().Substr(g.begin, g.end));
    ++breakdown.at(kind, oov);
  }
  return breakdown;
}

ErrorBreakdown ClassifyErrors(std::span<const BoundaryScores> scores,
                              std::span<const Segmentation> output,
                              std::span<const Segmentation> gold,
                              const Lexicon& lex) {
  CheckAligned(output, gold);
  if (scores.size() != gold.size()) {
    throw ArgumentError("score count differs from gold sentence count");
  }
  ErrorBreakdown total;
  for (size_t k = 0; k < gold.size(); ++k) {
    total += ClassifyErrors(scores[k], output[k], gold[k], lex);
  }
  return total;
}

EvalReport OracleBound(std::span<const BoundaryScores> scores,
                       std::span<const Segmentation> gold, Strategy strategy,
                       const Lexicon* lex) {
  if (scores.size() != gold.size()) {
    throw ArgumentError("score count differs from gold sentence count");
  }
  std::vector<Segmentation> output;
  output.reserve(gold.size());
  for (size_t k = 0; k < gold.size(); ++k) {
    output.push_back(Segment(scores[k], OraclePredicate(gold[k]), strategy));
  }
  return Evaluate(output, gold, lex);
}

std::string FormatPercent(double fraction) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.1f", fraction * 100.0);
  return buffer;
}

std::string RenderReport(const EvalReport& report,
                         const ErrorBreakdown* breakdown) {
  std::ostringstream out;
  out << "precision " << FormatPercent(report.precision) << "\n"
      << "recall    " << FormatPercent(report.recall) << "\n"
      << "F         " << FormatPercent(report.f_measure) << "\n"
      << "OOV rate  " << FormatPercent(report.oov_rate) << "\n"
      << "words     correct " << report.correct_words << ", output "
      << report.output_words << ", gold " << report.gold_words << "\n";
  if (report.output_words == 0 || report.gold_words == 0) {
    out << "note: degenerate input (no "
        << (report.output_words == 0 ? "output" : "gold")
        << " words); undefined ratios are reported as 0.0\n";
  }
  if (breakdown) out << RenderBreakdown(*breakdown);
  return out.str();
}

std::string RenderBreakdown(const ErrorBreakdown& breakdown) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-14s %8s %8s %8s\n", "", "IV", "OOV",
                "total");
  out << line;
  int64_t iv = 0;
  int64_t oov = 0;
  for (int k = 0; k < kNumErrorKinds; ++k) {
    const auto kind = static_cast<ErrorKind>(k);
    std::snprintf(line, sizeof(line), "%-14s %8lld %8lld %8lld\n",
                  std::string(ErrorKindName(kind)).c_str(),
                  static_cast<long long>(breakdown.at(kind, false)),
                  static_cast<long long>(breakdown.at(kind, true)),
                  static_cast<long long>(breakdown.KindTotal(kind)));
    out << line;
    iv += breakdown.at(kind, false);
    oov += breakdown.at(kind, true);
  }
  std::snprintf(line, sizeof(line), "%-14s %8lld %8lld %8lld\n", "total",
                static_cast<long long>(iv), static_cast<long long>(oov),
                static_cast<long long>(iv + oov));
  out << line;
  return out.str();
}

std::string RenderCsv(std::span<const CsvRow> rows) {
  std::string out;
  for (size_t k = 0; k < kCsvColumns.size(); ++k) {
    if (k > 0) out.push_back(',');
    out += kCsvColumns[k];
  }
  out.push_back('\n');
  for (const CsvRow& row : rows) {
    const auto& b = row.breakdown;
    out += CsvField(row.corpus) + "," + CsvField(row.strategy) + "," +
           CsvField(row.predicate) + "," + FormatPercent(row.report.precision) +
           "," + FormatPercent(row.report.recall) + "," +
           FormatPercent(row.report.f_measure) + "," +
           FormatPercent(row.report.oov_rate);
    for (int k = 0; k < kNumErrorKinds; ++k) {
      out += "," + std::to_string(b.counts[k][0]) + "," +
             std::to_string(b.counts[k][1]);
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<CsvRow> ParseCsv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != kCsvColumns.size()) {
      throw FormatError("expected " + std::to_string(kCsvColumns.size()) +
                            " CSV fields",
                        line_no);
    }
    if (line_no == 1 && fields[0] == kCsvColumns[0]) continue;
    CsvRow row;
    row.corpus = fields[0];
    row.strategy = fields[1];
    row.predicate = fields[2];
    row.report.precision = ParsePercent(fields[3], line_no);
    row.report.recall = ParsePercent(fields[4], line_no);
    row.report.f_measure = ParsePercent(fields[5], line_no);
    row.report.oov_rate = ParsePercent(fields[6], line_no);
    for (int k = 0; k < kNumErrorKinds; ++k) {
      row.breakdown.counts[k][0] = ParseCount(fields[7 + 2 * k], line_no);
      row.breakdown.counts[k][1] = ParseCount(fields[8 + 2 * k], line_no);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace segtree
