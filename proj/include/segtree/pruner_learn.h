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

// A learned pruning predicate: a linear classifier over features of a tree
// node, trained on low-confidence nodes with gold-standard labels.
//
// Typical flow:
//   1. CollectSamples() on held-out segmented sentences.
//   2. Build a TreeFrequencyIndex over the trees of the batch and a
//      StringFrequency over the available text.
//   3. ExtractFeatures() for every sample, then TrainPruner().
//   4. At test time, index the test batch first, then call
//      LearnedPredicate() per sentence.

#ifndef SEGTREE_PRUNER_LEARN_H_
#define SEGTREE_PRUNER_LEARN_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "segtree/boundary.h"
#include "segtree/corpus.h"
#include "segtree/pruning.h"
#include "segtree/tree.h"

namespace segtree {

// Nodes with a split score strictly inside this window are sampled for
// training and decided by the model at test time.
inline constexpr double kSampleWindowLow = 0.05;
inline constexpr double kSampleWindowHigh = 0.95;
inline constexpr double kBaseThreshold = 0.5;

inline bool InSampleWindow(double split_score) {
  return split_score > kSampleWindowLow && split_score < kSampleWindowHigh;
}

struct NodeContext {
  std::string left;    // c_i ... c_m
  std::string right;   // c_{m+1} ... c_j
  std::string merged;  // c_i ... c_j
  // Neighbouring words under the threshold-0.5 segmentation; nullopt at a
  // sentence edge.
  std::optional<std::string> left_prev;
  std::optional<std::string> right_next;
  TagDistribution marginals_split{};  // position m
  TagDistribution marginals_next{};   // position m + 1
  double split_score = 0.0;
  int left_length = 0;   // characters
  int right_length = 0;  // characters
};

// Context of an internal `node`. `marginals` must cover the tree's sentence.
NodeContext MakeNodeContext(const SegTree& tree, const SegTree::Node& node,
                            const TagMarginals& marginals);

// Substring occurrence counts over a text collection, via a suffix array.
class StringFrequency {
 public:
  StringFrequency() = default;
  explicit StringFrequency(std::span<const Sentence> texts);

  int64_t Count(std::u32string_view s) const;
  int64_t Count(std::string_view utf8) const;
  int64_t total_chars() const { return total_chars_; }

 private:
  std::u32string text_;  // sentences joined by a non-scalar separator
  std::vector<int32_t> suffixes_;
  int64_t total_chars_ = 0;
};

// How often each span string occurs as a node across a batch of trees, and
// the strings of its immediate parents.
class TreeFrequencyIndex {
 public:
  void AddTree(const SegTree& tree);

  int64_t Count(const std::string& s) const;
  // Nullptr when `s` never occurs below a parent.
  const std::unordered_set<std::string>* Parents(const std::string& s) const;
  size_t size() const { return counts_.size(); }

 private:
  std::unordered_map<std::string, int64_t> counts_;
  std::unordered_map<std::string, std::unordered_set<std::string>> parents_;
};

// (ad - bc)^2 / ((a+b)(a+c)(b+d)(c+d)) with a = joint, a+b = left,
// a+c = right, a+b+c+d = total. Zero when a marginal factor is zero.
// Throws ArgumentError when the counts imply a negative cell or total <= 0.
double Chi2Assoc(int64_t joint, int64_t left, int64_t right, int64_t total);

using FeatureVector = std::map<std::string, double>;

struct FeatureSources {
  const Lexicon* lexicon = nullptr;
  const TreeFrequencyIndex* tree_index = nullptr;
  const StringFrequency* counts = nullptr;
};

// Tree counts of zero are treated as this value before taking logs.
inline constexpr double kZeroCountFloor = 0.5;
inline constexpr int kMaxLengthBucket = 5;

FeatureVector ExtractFeatures(const NodeContext& ctx,
                              const FeatureSources& sources);

struct LabeledSample {
  NodeContext context;
  int label = 0;  // 1 = merge
};

// Every internal node with a split score inside the sample window, labeled
// by the oracle predicate. Throws ArgumentError on an empty corpus.
std::vector<LabeledSample> CollectSamples(std::span<const Segmentation> corpus,
                                          const BoundaryTagger& tagger);

struct PrunerConfig {
  int epochs = 30;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  int batch_size = 32;
  uint64_t seed = 1;
  double holdout_fraction = 0.1;

  bool operator==(const PrunerConfig&) const = default;
};

struct PrunerExample {
  FeatureVector features;
  int label = 0;
};

// Word lists and text needed to evaluate the learned predicate on new input.
struct PrunerResources {
  Lexicon lexicon;
  std::vector<Sentence> frequency_text;
};

class PruneModel {
 public:
  double Decision(const FeatureVector& features) const;
  // Logistic probability of merging.
  double MergeProbability(const FeatureVector& features) const;

  const std::map<std::string, double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  const PrunerConfig& config() const { return config_; }
  std::optional<double> heldout_accuracy() const { return heldout_accuracy_; }

  void set_weights(std::map<std::string, double> weights) {
    weights_ = std::move(weights);
  }
  void set_bias(double bias) { bias_ = bias; }
  void set_config(const PrunerConfig& config) { config_ = config; }
  void set_heldout_accuracy(std::optional<double> a) { heldout_accuracy_ = a; }

  // Versioned JSON ("segtree-pruner", version 1). Resources, when given,
  // are embedded so that the file is self-contained.
  std::string ToJson(const PrunerResources* resources = nullptr) const;
  static PruneModel FromJson(std::string_view text,
                             PrunerResources* resources = nullptr);
  void Save(const std::string& path,
            const PrunerResources* resources = nullptr) const;
  static PruneModel Load(const std::string& path,
                         PrunerResources* resources = nullptr);

  bool operator==(const PruneModel&) const = default;

 private:
  std::map<std::string, double> weights_;
  double bias_ = 0.0;
  PrunerConfig config_;
  std::optional<double> heldout_accuracy_;
};

// Dense view of examples for the loss: parameters are one weight per
// feature name followed by the bias.
struct PrunerProblem {
  std::vector<std::string> feature_names;
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<int> labels;

  static PrunerProblem Build(std::span<const PrunerExample> examples);
  size_t num_parameters() const { return feature_names.size() + 1; }
};

// Mean logistic loss plus (l2 / 2) * |w|^2 (bias unregularized).
double PrunerObjective(const PrunerProblem& problem,
                       std::span<const double> params, double l2,
                       std::vector<double>* gradient);

// L2-regularized logistic regression by seeded mini-batch gradient descent,
// holding out `holdout_fraction` of the examples for an accuracy estimate.
// Throws TrainingError unless both labels occur.
PruneModel TrainPruner(std::span<const PrunerExample> examples,
                       const PrunerConfig& config);

// Outside the sample window: the threshold-0.5 decision. Inside: merge iff
// the model's decision value is positive. All referenced objects must
// outlive the predicate.
PrunePredicate LearnedPredicate(const PruneModel& model,
                                const FeatureSources& sources,
                                const TagMarginals& marginals);

// One sample per line: label, then tab-separated name=value pairs.
std::string DumpSamples(std::span<const PrunerExample> examples);

}  // namespace segtree

#endif  // SEGTREE_PRUNER_LEARN_H_
