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

// Boundary-confidence providers. Every provider follows one convention:
// a larger score at gap i means a word boundary between c_i and c_{i+1} is
// more likely.

#ifndef SEGTREE_BOUNDARY_H_
#define SEGTREE_BOUNDARY_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "segtree/corpus.h"

namespace segtree {

struct BoundaryScores {
  Sentence sentence;
  std::vector<double> scores;  // scores[i - 1] = b(c_i), i = 1 .. n-1

  BoundaryScores() = default;
  // Throws ArgumentError on a length mismatch or non-finite values.
  BoundaryScores(Sentence s, std::vector<double> values);

  double at(int gap) const { return scores[gap - 1]; }  // 1-based gap
  int num_chars() const { return sentence.size(); }
};

using TagDistribution = std::array<double, kNumTags>;  // indexed by Tag

struct TagMarginals {
  Sentence sentence;
  std::vector<TagDistribution> probs;  // probs[k - 1] for position k

  const TagDistribution& at(int position) const { return probs[position - 1]; }
  double prob(int position, Tag tag) const {
    return probs[position - 1][static_cast<int>(tag)];
  }
};

// -log(p_xy / (p_x * p_y)): the negated pointwise mutual information.
double NegatedPmi(double p_xy, double p_x, double p_y);

inline constexpr double kPmiSmoothing = 0.5;

// Additively smoothed character probabilities. The unigram vocabulary is
// the observed characters plus one slot for unseen ones; the bigram
// vocabulary is every ordered pair over that set.
class SmoothedCharModel {
 public:
  explicit SmoothedCharModel(const CharStats& stats,
                             double alpha = kPmiSmoothing);

  double CharProb(char32_t c) const;
  double PairProb(char32_t a, char32_t b) const;

 private:
  const CharStats* stats_;
  double alpha_;
  double unigram_denominator_;
  double bigram_denominator_;
};

// Negated PMI at every gap of `sentence`.
BoundaryScores PmiScores(const Sentence& sentence, const CharStats& stats,
                         double alpha = kPmiSmoothing);

// b(c_i) = P(t_i = S) + P(t_i = E).
BoundaryScores BoundaryFromMarginals(const TagMarginals& marginals);

struct TaggerConfig {
  int epochs = 10;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  int batch_size = 32;
  uint64_t seed = 1;
};

// Character-window feature templates: three unigram and four bigram windows
// around the current position. Out-of-sentence slots use "<s>" / "</s>".
inline constexpr int kNumTaggerTemplates = 7;
const std::array<std::string_view, kNumTaggerTemplates>& TaggerTemplates();

// Feature strings ("<template>=<chars>") at 1-based `position`.
std::array<std::string, kNumTaggerTemplates> TaggerFeatures(
    const Sentence& sentence, int position);

// Position-wise multinomial logistic model over {B, M, E, S}.
class BoundaryTagger {
 public:
  BoundaryTagger() = default;

  TagMarginals Marginals(const Sentence& sentence) const;

  // Weights for `feature`, or nullptr when the feature is unknown.
  const TagDistribution* Weights(std::string_view feature) const;
  void SetWeights(const std::string& feature, const TagDistribution& w);
  size_t num_features() const { return weights_.size(); }

  const TaggerConfig& config() const { return config_; }
  void set_config(const TaggerConfig& config) { config_ = config; }

  // Versioned JSON ("segtree-tagger", version 1). Keys are sorted so that
  // equal models serialize to identical bytes.
  std::string ToJson() const;
  static BoundaryTagger FromJson(std::string_view text);
  void Save(const std::string& path) const;
  static BoundaryTagger Load(const std::string& path);

  bool operator==(const BoundaryTagger& other) const;

 private:
  std::unordered_map<std::string, TagDistribution> weights_;
  TaggerConfig config_;
};

// Training data with features interned to dense ids in first-seen order.
struct TaggerProblem {
  std::vector<std::string> feature_names;
  std::vector<std::array<int, kNumTaggerTemplates>> positions;
  std::vector<int> gold;  // Tag index per position

  static TaggerProblem Build(std::span<const Segmentation> corpus);
  size_t num_parameters() const { return feature_names.size() * kNumTags; }
};

// Mean negative log-likelihood plus (l2 / 2) * |w|^2 over a flat parameter
// vector laid out as [feature * kNumTags + tag]. Writes the gradient when
// `gradient` is non-null.
double TaggerObjective(const TaggerProblem& problem,
                       std::span<const double> params, double l2,
                       std::vector<double>* gradient);

// Seeded mini-batch gradient descent. L2 decay is applied to the features
// active in each batch. Throws ArgumentError on an empty corpus.
BoundaryTagger TrainTagger(std::span<const Segmentation> train,
                           const TaggerConfig& config);

// Convenience: marginals followed by BoundaryFromMarginals.
BoundaryScores TaggerScores(const BoundaryTagger& tagger,
                            const Sentence& sentence);

// Score files: one line per sentence, n-1 space-separated decimals.
std::vector<BoundaryScores> LoadExternalScores(
    const std::string& path, std::span<const Sentence> sentences);
std::vector<BoundaryScores> ParseExternalScores(
    std::span<const std::string> lines, std::span<const Sentence> sentences);
// Shortest round-trip formatting.
std::string FormatScore(double value);
std::string FormatScoresLine(const BoundaryScores& scores);

}  // namespace segtree

#endif  // SEGTREE_BOUNDARY_H_
