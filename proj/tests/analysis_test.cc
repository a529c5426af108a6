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

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "segtree/analysis.h"
#include "segtree/errors.h"
#include "test_util.h"

namespace segtree {
namespace {

using ::segtree::testing::Chars;
using ::segtree::testing::MakeScores;
using ::segtree::testing::RandomDistinctScores;
using ::segtree::testing::RandomPartition;
using ::segtree::testing::Seg;

std::vector<Segmentation> One(const Segmentation& seg) { return {seg}; }

TEST(EvaluateTest, IdenticalOutputIsPerfect) {
  const auto gold = One(Seg("材料 利用率 高"));
  const EvalReport r = Evaluate(gold, gold);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f_measure, 1.0);
}

TEST(EvaluateTest, PartialMatch) {
  const EvalReport r =
      Evaluate(One(Seg("材料 利用率高")), One(Seg("材料 利用率 高")));
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.f_measure, 0.4);
  EXPECT_EQ(r.correct_words, 1);
  EXPECT_EQ(r.output_words, 2);
  EXPECT_EQ(r.gold_words, 3);
}

TEST(EvaluateTest, OovRateAgainstLexicon) {
  const Lexicon lex = BuildLexicon(One(Seg("材料 高")));
  const EvalReport r =
      Evaluate(One(Seg("材料 利用率 高")), One(Seg("材料 利用率 高")), &lex);
  EXPECT_DOUBLE_EQ(r.oov_rate, 1.0 / 3.0);
}

TEST(EvaluateTest, MisalignedSentencesCiteTheLine) {
  const std::vector<Segmentation> output = {Seg("老 树"), Seg("老人")};
  const std::vector<Segmentation> gold = {Seg("老 树"), Seg("老 树")};
  try {
    Evaluate(output, gold);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(Evaluate(One(Seg("老")), {}), FormatError);
}

TEST(ClassifyErrorsTest, TreeErrors) {
  const BoundaryScores scores = MakeScores({0.9, 0.2, 0.3});
  const Sentence s = scores.sentence;
  const Segmentation gold(s, {2});
  const Segmentation output(s, {1});
  const ErrorBreakdown b = ClassifyErrors(scores, output, gold, Lexicon());
  EXPECT_EQ(b.KindTotal(ErrorKind::kTree), 2);
  EXPECT_EQ(b.Total(), 2);
}

TEST(ClassifyErrorsTest, OverPruningAndTreeError) {
  const BoundaryScores scores = MakeScores({0.9, 0.2, 0.3});
  const Sentence s = scores.sentence;
  const Segmentation gold(s, {1, 2});
  const Segmentation output(s, {1});
  const ErrorBreakdown b = ClassifyErrors(scores, output, gold, Lexicon());
  EXPECT_EQ(b.KindTotal(ErrorKind::kOverPruning), 1);
  EXPECT_EQ(b.KindTotal(ErrorKind::kTree), 1);
  EXPECT_EQ(b.KindTotal(ErrorKind::kLessPruning), 0);
  // Nothing is in the (empty) lexicon.
  EXPECT_EQ(b.at(ErrorKind::kOverPruning, true), 1);
}

TEST(ClassifyErrorsTest, LessPruningAndIvSplit) {
  const BoundaryScores scores(Sentence::FromUtf8("老人"), {0.7});
  const Lexicon lex = BuildLexicon(One(Seg("老人")));
  const ErrorBreakdown b =
      ClassifyErrors(scores, Seg("老 人"), Seg("老人"), lex);
  EXPECT_EQ(b.at(ErrorKind::kLessPruning, false), 1);
  EXPECT_EQ(b.Total(), 1);
}

TEST(ClassifyErrorsTest, PerfectOutputHasNoErrors) {
  const BoundaryScores scores(Sentence::FromUtf8("材料利用率高"),
                              {0.1, 0.95, 0.1, 0.1, 0.9});
  const Segmentation gold = Seg("材料 利用率 高");
  EXPECT_EQ(ClassifyErrors(scores, gold, gold, Lexicon()).Total(), 0);
}

TEST(AnalysisPropertyTest, AccountingIdentityAndOracleContainment) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const BoundaryScores scores =
        MakeScores(Chars(n), RandomDistinctScores(rng, n - 1));
    const Segmentation gold = RandomPartition(rng, scores.sentence);
    const Strategy strategy =
        rng() % 2 ? Strategy::kTopDown : Strategy::kBottomUp;
    const Segmentation output =
        Segment(scores, ThresholdPredicate(u(rng)), strategy);
    const ErrorBreakdown b = ClassifyErrors(scores, output, gold, Lexicon());
    const EvalReport r = Evaluate(One(output), One(gold));
    EXPECT_EQ(b.Total(), r.gold_words - r.correct_words);

    // Bottom-up oracle pruning merges a node only when no gold boundary lies
    // inside it, so it misses exactly the gold words that are not nodes.
    const auto oracle_missed = MissedGoldWords(
        Segment(scores, OraclePredicate(gold), Strategy::kBottomUp), gold);
    const SpanSet nodes = NodeSpans(BuildTree(scores));
    std::set<Span> tree_errors;
    for (const Span& w : gold.WordSpans()) {
      if (!nodes.count(w)) tree_errors.insert(w);
    }
    EXPECT_EQ(std::set<Span>(oracle_missed.begin(), oracle_missed.end()),
              tree_errors);
    const auto missed = MissedGoldWords(output, gold);
    const auto top_down_missed = MissedGoldWords(
        Segment(scores, OraclePredicate(gold), Strategy::kTopDown), gold);
    for (const Span& w : oracle_missed) {
      EXPECT_NE(std::find(missed.begin(), missed.end(), w), missed.end());
      EXPECT_NE(std::find(top_down_missed.begin(), top_down_missed.end(), w),
                top_down_missed.end());
    }
  }
}

// Top-down oracle pruning can merge across a gold boundary that is not the
// node's own split gap.
TEST(AnalysisPropertyTest, TopDownOracleCanOverMerge) {
  const BoundaryScores scores = MakeScores({0.2, 0.1, 0.9});
  const Segmentation gold(scores.sentence, {1});
  const Segmentation top_down =
      Segment(scores, OraclePredicate(gold), Strategy::kTopDown);
  EXPECT_TRUE(top_down.boundaries().empty());
  EXPECT_EQ(Segment(scores, OraclePredicate(gold), Strategy::kBottomUp)
                .boundaries(),
            (std::vector<int>{1, 3}));
}

// For outputs of our own pruners, the output-based classification matches
// the pruning process: a missed gold node below the kept fragment was merged
// away (over-pruning); one inside it was split (less-pruning).
TEST(AnalysisPropertyTest, MatchesProcessRelativeDefinition) {
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const BoundaryScores scores =
        MakeScores(Chars(n), RandomDistinctScores(rng, n - 1));
    const SegTree tree = BuildTree(scores);
    std::vector<char> decision(tree.num_nodes());
    for (auto& d : decision) d = rng() % 2;
    const PrunePredicate p = [&decision](const SegTree& t,
                                         const SegTree::Node& node) {
      return decision[&node - t.nodes().data()] != 0;
    };
    const PrunedTree pruned =
        rng() % 2 ? Tdtp(tree, p) : Butp(tree, p);
    const Segmentation output = pruned.ToSegmentation();
    const Segmentation gold = RandomPartition(rng, scores.sentence);

    ErrorBreakdown expected;
    for (const Span& w : MissedGoldWords(output, gold)) {
      NodeId id = kNoNode;
      for (NodeId k = 0; k < tree.num_nodes(); ++k) {
        if (tree.node(k).span == w) id = k;
      }
      ErrorKind kind = ErrorKind::kTree;
      if (id != kNoNode) {
        kind = pruned.is_kept(id) ? ErrorKind::kLessPruning
                                  : ErrorKind::kOverPruning;
      }
      ++expected.at(kind, true);
    }
    EXPECT_EQ(ClassifyErrors(scores, output, gold, Lexicon()), expected);
  }
}

TEST(OracleBoundTest, GoldFromTreeNodesIsPerfect) {
  const BoundaryScores scores(Sentence::FromUtf8("材料利用率高"),
                              {0.1, 0.95, 0.1, 0.1, 0.9});
  const std::vector<BoundaryScores> all = {scores};
  for (Strategy s : {Strategy::kTopDown, Strategy::kBottomUp}) {
    EXPECT_EQ(OracleBound(all, One(Seg("材料 利用率 高")), s).f_measure, 1.0);
  }
}

TEST(RenderTest, Percentages) {
  EXPECT_EQ(FormatPercent(0.962), "96.2");
  EXPECT_EQ(FormatPercent(0.0), "0.0");
  EXPECT_EQ(FormatPercent(1.0), "100.0");
}

TEST(RenderTest, DegenerateInputIsNoted) {
  EvalReport empty;
  empty.gold_words = 3;
  const std::string text = RenderReport(empty);
  EXPECT_NE(text.find("F         0.0"), std::string::npos);
  EXPECT_NE(text.find("degenerate"), std::string::npos);
}

TEST(RenderTest, BreakdownTable) {
  ErrorBreakdown b;
  b.at(ErrorKind::kTree, false) = 2;
  b.at(ErrorKind::kLessPruning, true) = 1;
  const std::string text = RenderBreakdown(b);
  EXPECT_NE(text.find("tree error"), std::string::npos);
  EXPECT_NE(text.find("total"), std::string::npos);
  EXPECT_NE(text.find("       2        0        2"), std::string::npos);
}

TEST(CsvTest, RoundTripAtRenderedPrecision) {
  CsvRow row;
  row.corpus = "toy";
  row.strategy = "tdtp";
  row.predicate = "threshold:0.5";
  row.report.precision = 0.5;
  row.report.recall = 1.0 / 3.0;
  row.report.f_measure = 0.4;
  row.report.oov_rate = 0.962;
  row.breakdown.at(ErrorKind::kTree, false) = 4;
  row.breakdown.at(ErrorKind::kOverPruning, true) = 7;
  const std::vector<CsvRow> rows = {row};
  const std::string text = RenderCsv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "corpus,strategy,predicate,precision,recall,f,oov_rate,tree_iv,"
            "tree_oov,over_iv,over_oov,less_iv,less_oov");
  const auto parsed = ParseCsv(text);
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0].corpus, "toy");
  EXPECT_EQ(parsed[0].predicate, "threshold:0.5");
  EXPECT_EQ(FormatPercent(parsed[0].report.recall), "33.3");
  EXPECT_EQ(FormatPercent(parsed[0].report.oov_rate), "96.2");
  EXPECT_EQ(parsed[0].breakdown, row.breakdown);
  EXPECT_EQ(RenderCsv(parsed), text);
}

}  // namespace
}  // namespace segtree
