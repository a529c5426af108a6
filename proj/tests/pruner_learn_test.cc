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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "segtree/errors.h"
#include "segtree/pruner_learn.h"
#include "segtree/pruning.h"
#include "test_util.h"

namespace segtree {
namespace {

using ::segtree::testing::Chars;
using ::segtree::testing::MakeScores;
using ::segtree::testing::RandomDistinctScores;
using ::segtree::testing::Seg;

TagMarginals Uniform(const Sentence& s) {
  TagMarginals m{s, {}};
  m.probs.assign(s.size(), {0.25, 0.25, 0.25, 0.25});
  return m;
}

// A tagger whose boundary score after `c` is P(S) + P(E) = p.
BoundaryTagger TaggerWithScoreAfter(const std::string& c, double p) {
  BoundaryTagger tagger;
  const double a = std::log(p / (1.0 - p));
  tagger.SetWeights("C0=" + c, {0.0, 0.0, a, a});
  return tagger;
}

// Examples where feature "x" alone decides the label.
std::vector<PrunerExample> SeparableExamples(int count) {
  std::vector<PrunerExample> out;
  for (int k = 0; k < count; ++k) {
    const int label = k % 2;
    out.push_back({{{"x", label ? 1.0 : -1.0}, {"noise", (k % 7) / 7.0}}, label});
  }
  return out;
}

TEST(CollectSamplesTest, Window) {
  const std::vector<Segmentation> confident = {Seg("老 树")};
  EXPECT_TRUE(
      CollectSamples(confident, TaggerWithScoreAfter("老", 0.97)).empty());

  const auto samples = CollectSamples(confident, BoundaryTagger());
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_DOUBLE_EQ(samples[0].context.split_score, 0.5);
  EXPECT_EQ(samples[0].label, 0);

  const std::vector<Segmentation> merged = {Seg("老树")};
  EXPECT_EQ(CollectSamples(merged, BoundaryTagger())[0].label, 1);

  const std::vector<Segmentation> single = {Seg("高")};
  EXPECT_TRUE(CollectSamples(single, BoundaryTagger()).empty());
  EXPECT_THROW(CollectSamples({}, BoundaryTagger()), ArgumentError);
}

TEST(Chi2AssocTest, Examples) {
  EXPECT_DOUBLE_EQ(Chi2Assoc(10, 10, 10, 100), 1.0);
  EXPECT_DOUBLE_EQ(Chi2Assoc(1, 10, 10, 100), 0.0);
  EXPECT_NEAR(Chi2Assoc(2, 4, 4, 10), 16.0 / 576.0, 1e-12);
}

TEST(Chi2AssocTest, InconsistentCountsAreRejected) {
  EXPECT_THROW(Chi2Assoc(5, 4, 6, 20), ArgumentError);
  EXPECT_THROW(Chi2Assoc(1, 6, 6, 5), ArgumentError);
  EXPECT_THROW(Chi2Assoc(0, 0, 0, 0), ArgumentError);
  EXPECT_DOUBLE_EQ(Chi2Assoc(0, 0, 3, 10), 0.0);
}

TEST(Chi2AssocTest, RangeZeroAndSymmetry) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 2000; ++trial) {
    const int64_t a = rng() % 20, b = rng() % 20, c = rng() % 20, d = rng() % 20;
    if (a + b + c + d == 0) continue;
    const double v = Chi2Assoc(a, a + b, a + c, a + b + c + d);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_EQ(v, Chi2Assoc(a, a + c, a + b, a + b + c + d));
    if ((a + b) * (a + c) * (b + d) * (c + d) > 0) {
      EXPECT_EQ(v == 0.0, a * d == b * c);
    }
  }
}

TEST(StringFrequencyTest, CountsOverlappingOccurrences) {
  const std::vector<Sentence> text = {Sentence::FromUtf8("老老老"),
                                      Sentence::FromUtf8("老人")};
  const StringFrequency counts(text);
  EXPECT_EQ(counts.total_chars(), 5);
  EXPECT_EQ(counts.Count(std::string_view("老")), 4);
  EXPECT_EQ(counts.Count(std::string_view("老老")), 2);
  EXPECT_EQ(counts.Count(std::string_view("老人")), 1);
  // Occurrences never span two sentences.
  EXPECT_EQ(counts.Count(std::string_view("老老老老")), 0);
  EXPECT_EQ(counts.Count(std::string_view("人老")), 0);
}

TEST(ExtractFeaturesTest, LengthBuckets) {
  const SegTree tree = BuildTree(MakeScores({0.9, 0.3}));
  const NodeContext ctx =
      MakeNodeContext(tree, tree.node(0), Uniform(tree.sentence()));
  EXPECT_EQ(ctx.left_length, 1);
  EXPECT_EQ(ctx.right_length, 2);
  const FeatureVector f = ExtractFeatures(ctx, {});
  EXPECT_EQ(f.at("len:l=1"), 1.0);
  EXPECT_EQ(f.at("len:r=2"), 1.0);
  int length_features = 0;
  for (const auto& [name, value] : f) {
    if (name.starts_with("len:")) ++length_features;
  }
  EXPECT_EQ(length_features, 2);
  EXPECT_EQ(f.count("tagger:b"), 1u);
  EXPECT_EQ(f.count("tagger:P_m+1_S"), 1u);
}

TEST(ExtractFeaturesTest, MergedWordInLexicon) {
  const std::vector<Segmentation> train = {Seg("老人 高")};
  const Lexicon lex = BuildLexicon(train);
  const SegTree tree = BuildTree(
      BoundaryScores(Sentence::FromUtf8("老人"), std::vector<double>{0.5}));
  const NodeContext ctx =
      MakeNodeContext(tree, tree.node(0), Uniform(tree.sentence()));
  EXPECT_EQ(ctx.left, "老");
  EXPECT_EQ(ctx.right, "人");
  EXPECT_EQ(ctx.merged, "老人");
  const FeatureVector f = ExtractFeatures(ctx, {&lex, nullptr, nullptr});
  EXPECT_EQ(f.at("dict:m=iv"), 1.0);
  EXPECT_EQ(f.at("dict:l=oov"), 1.0);
  EXPECT_EQ(f.at("dict:lprev_l=edge"), 1.0);
  EXPECT_EQ(f.at("dict:m_rnext=edge"), 1.0);
}

TEST(ExtractFeaturesTest, TreeFrequencies) {
  TreeFrequencyIndex index;
  const BoundaryScores with_parent(Sentence::FromUtf8("老人高"), {0.1, 0.9});
  const BoundaryScores alone(Sentence::FromUtf8("老人"), {0.5});
  for (int k = 0; k < 2; ++k) index.AddTree(BuildTree(with_parent));
  for (int k = 0; k < 6; ++k) index.AddTree(BuildTree(alone));
  EXPECT_EQ(index.Count("老人"), 8);
  EXPECT_EQ(index.Count("老人高"), 2);

  const SegTree tree = BuildTree(alone);
  const NodeContext ctx =
      MakeNodeContext(tree, tree.node(0), Uniform(tree.sentence()));
  const FeatureVector f = ExtractFeatures(ctx, {nullptr, &index, nullptr});
  EXPECT_NEAR(f.at("tree:log_freq"), std::log(8.0), 1e-12);
  EXPECT_NEAR(f.at("tree:log_ratio"), std::log(8.0) - std::log(2.0), 1e-12);
}

TEST(ExtractFeaturesTest, ContextWordsFollowTheBaseSegmentation) {
  // Base segmentation at 0.5: 甲乙 | 丙丁 | 戊.
  const BoundaryScores scores(Sentence::FromUtf8("甲乙丙丁戊"),
                              {0.1, 0.8, 0.2, 0.7});
  const SegTree tree = BuildTree(scores);
  const auto& root = tree.node(0);
  const auto& right = tree.node(root.right);  // 丙丁戊, split at gap 4
  const NodeContext ctx = MakeNodeContext(tree, right, Uniform(scores.sentence));
  EXPECT_EQ(ctx.left, "丙丁");
  EXPECT_EQ(ctx.right, "戊");
  ASSERT_TRUE(ctx.left_prev.has_value());
  EXPECT_EQ(*ctx.left_prev, "甲乙");
  EXPECT_FALSE(ctx.right_next.has_value());
}

TEST(ExtractFeaturesTest, AlwaysFinite) {
  std::mt19937_64 rng(41);
  std::vector<Sentence> text;
  std::vector<Segmentation> corpus;
  for (int k = 0; k < 20; ++k) text.push_back(Chars(1 + k % 9));
  for (const auto& s : text) corpus.emplace_back(s, std::vector<int>{});
  const Lexicon lex = BuildLexicon(corpus);
  const StringFrequency counts(text);
  TreeFrequencyIndex index;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 14);
    const BoundaryScores scores =
        MakeScores(Chars(n), RandomDistinctScores(rng, n - 1));
    const SegTree tree = BuildTree(scores);
    if (trial % 2) index.AddTree(tree);
    for (const auto& node : tree.nodes()) {
      if (node.is_leaf()) continue;
      const FeatureVector f = ExtractFeatures(
          MakeNodeContext(tree, node, Uniform(scores.sentence)),
          {&lex, &index, &counts});
      for (const auto& [name, value] : f) {
        EXPECT_TRUE(std::isfinite(value)) << name;
      }
    }
  }
}

TEST(TrainPrunerTest, SeparableSamplesGeneralize) {
  const auto examples = SeparableExamples(200);
  const PruneModel model = TrainPruner(examples, PrunerConfig{});
  ASSERT_TRUE(model.heldout_accuracy().has_value());
  EXPECT_DOUBLE_EQ(*model.heldout_accuracy(), 1.0);
}

TEST(TrainPrunerTest, DeterministicForFixedSeed) {
  const auto examples = SeparableExamples(100);
  PrunerConfig config;
  config.epochs = 3;
  EXPECT_EQ(TrainPruner(examples, config), TrainPruner(examples, config));
}

TEST(TrainPrunerTest, ZeroEpochsGiveAnUntrainedModel) {
  PrunerConfig config;
  config.epochs = 0;
  const PruneModel model = TrainPruner(SeparableExamples(40), config);
  for (const auto& [name, w] : model.weights()) EXPECT_EQ(w, 0.0) << name;
  EXPECT_EQ(model.bias(), 0.0);
  EXPECT_DOUBLE_EQ(model.MergeProbability({{"x", 1.0}}), 0.5);
}

TEST(TrainPrunerTest, SingleClassIsATrainingError) {
  std::vector<PrunerExample> examples(5, PrunerExample{{{"x", 1.0}}, 1});
  try {
    TrainPruner(examples, PrunerConfig{});
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate label distribution"),
              std::string::npos);
  }
}

TEST(PrunerObjectiveTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<PrunerExample> examples;
  for (int k = 0; k < 12; ++k) {
    PrunerExample ex;
    for (int f = 0; f < 9; ++f) {
      if (rng() % 3) ex.features["f" + std::to_string(f)] = u(rng);
    }
    ex.label = static_cast<int>(rng() % 2);
    examples.push_back(ex);
  }
  const PrunerProblem problem = PrunerProblem::Build(examples);
  ASSERT_EQ(problem.num_parameters(), 10u);
  std::vector<double> params(10);
  for (double& p : params) p = u(rng);
  std::vector<double> grad;
  const double l2 = 0.05;
  PrunerObjective(problem, params, l2, &grad);
  const double h = 1e-5;
  for (size_t k = 0; k < params.size(); ++k) {
    auto plus = params;
    auto minus = params;
    plus[k] += h;
    minus[k] -= h;
    const double numeric = (PrunerObjective(problem, plus, l2, nullptr) -
                            PrunerObjective(problem, minus, l2, nullptr)) /
                           (2 * h);
    EXPECT_LE(std::abs(grad[k] - numeric),
              1e-4 * std::max(std::abs(numeric), std::abs(grad[k])) + 1e-10);
  }
}

TEST(PrunerObjectiveTest, FullBatchDescentNeverIncreasesLoss) {
  const auto examples = SeparableExamples(30);
  const PrunerProblem problem = PrunerProblem::Build(examples);
  std::vector<double> params(problem.num_parameters(), 0.0);
  std::vector<double> grad;
  double previous = PrunerObjective(problem, params, 1e-3, &grad);
  for (int epoch = 0; epoch < 50; ++epoch) {
    for (size_t k = 0; k < params.size(); ++k) params[k] -= 0.1 * grad[k];
    const double loss = PrunerObjective(problem, params, 1e-3, &grad);
    EXPECT_LE(loss, previous + 1e-15);
    previous = loss;
  }
}

TEST(PruneModelTest, JsonRoundTripIsBitExact) {
  const PruneModel model = TrainPruner(SeparableExamples(50), PrunerConfig{});
  PrunerResources resources;
  const std::vector<Segmentation> train = {Seg("老人 高"), Seg("材料 利用率")};
  resources.lexicon = BuildLexicon(train);
  resources.frequency_text = SentencesOf(train);
  PrunerResources loaded;
  const PruneModel copy =
      PruneModel::FromJson(model.ToJson(&resources), &loaded);
  EXPECT_EQ(copy, model);
  EXPECT_EQ(loaded.lexicon.SortedUnigrams(), resources.lexicon.SortedUnigrams());
  EXPECT_EQ(loaded.lexicon.SortedBigrams(), resources.lexicon.SortedBigrams());
  EXPECT_EQ(loaded.frequency_text, resources.frequency_text);
  EXPECT_THROW(PruneModel::FromJson("{\"format\": \"segtree-tagger\"}"),
               FormatError);
}

TEST(LearnedPredicateTest, WindowAndSignRules) {
  PruneModel model;
  model.set_bias(2.3);
  const Lexicon lex;
  const FeatureSources sources{&lex, nullptr, nullptr};
  for (double b : {0.99, 0.01, 0.5}) {
    const SegTree tree = BuildTree(MakeScores({b}));
    const PrunePredicate p =
        LearnedPredicate(model, sources, Uniform(tree.sentence()));
    const bool expected = b == 0.99 ? false : true;
    EXPECT_EQ(p(tree, tree.node(0)), expected) << b;
  }
  model.set_bias(-2.3);
  const SegTree tree = BuildTree(MakeScores({0.5}));
  EXPECT_FALSE(LearnedPredicate(model, sources, Uniform(tree.sentence()))(
      tree, tree.node(0)));
}

TEST(LearnedPredicateTest, AgreesWithThresholdOutsideWindow) {
  std::mt19937_64 rng(61);
  PruneModel model;
  model.set_weights({{"tagger:b", 5.0}, {"len:l=1", -3.0}});
  model.set_bias(0.7);
  const FeatureSources sources;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 10);
    const BoundaryScores scores =
        MakeScores(Chars(n), RandomDistinctScores(rng, n - 1));
    const SegTree tree = BuildTree(scores);
    const PrunePredicate learned =
        LearnedPredicate(model, sources, Uniform(scores.sentence));
    const PrunePredicate threshold = ThresholdPredicate(kBaseThreshold);
    for (const auto& node : tree.nodes()) {
      if (node.is_leaf() || InSampleWindow(node.split_score)) continue;
      EXPECT_EQ(learned(tree, node), threshold(tree, node));
    }
  }
}

TEST(DumpSamplesTest, LabelThenPairs) {
  const std::vector<PrunerExample> examples = {{{{"a", 1.0}, {"b", 0.5}}, 1}};
  EXPECT_EQ(DumpSamples(examples), "1\ta=1\tb=0.5\n");
}

}  // namespace
}  // namespace segtree
