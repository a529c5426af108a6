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

#include "segtree/pruner_learn.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "segtree/utf8.h"

namespace segtree {
namespace {

constexpr std::string_view kPrunerFormat = "segtree-pruner";
constexpr int kPrunerVersion = 1;
constexpr char32_t kSeparator = 0xFFFFFFFF;

constexpr std::array<std::string_view, kNumTags> kTagNames = {"B", "M", "E",
                                                              "S"};

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

std::string LengthBucket(int length) {
  return length >= kMaxLengthBucket ? ">=" + std::to_string(kMaxLengthBucket)
                                    : "=" + std::to_string(length);
}

double LogTreeCount(int64_t count) {
  return std::log(count > 0 ? static_cast<double>(count) : kZeroCountFloor);
}

// Chi-square-like association of the pair (x, y) from substring counts.
// Counts from different sources need not be mutually consistent, so the
// table is repaired before scoring.
double PairAssociation(const StringFrequency& counts, const std::string& x,
                       const std::string& y) {
  const int64_t joint = counts.Count(x + y);
  const int64_t left = std::max(counts.Count(x), joint);
  const int64_t right = std::max(counts.Count(y), joint);
  const int64_t total =
      std::max(counts.total_chars(), left + right - joint);
  if (total <= 0) return 0.0;
  return Chi2Assoc(joint, left, right, total);
}

}  // namespace

NodeContext MakeNodeContext(const SegTree& tree, const SegTree::Node& node,
                            const TagMarginals& marginals) {
  if (node.is_leaf()) throw ArgumentError("node context of a leaf");
  if (!(marginals.sentence == tree.sentence())) {
    throw ArgumentError("marginals are over a different sentence");
  }
  const Sentence& s = tree.sentence();
  const BoundaryScores& b = tree.scores();
  const int n = s.size();
  const int i = node.span.begin;
  const int m = node.split_gap;
  const int j = node.span.end;

  NodeContext ctx;
  ctx.left = s.Substr(i, m);
  ctx.right = s.Substr(m + 1, j);
  ctx.merged = s.Substr(i, j);
  ctx.left_length = m - i + 1;
  ctx.right_length = j - m;
  ctx.split_score = node.split_score;
  ctx.marginals_split = marginals.at(m);
  ctx.marginals_next = marginals.at(m + 1);
  if (i > 1) {
    int u = i - 1;
    while (u > 1 && b.at(u - 1) < kBaseThreshold) --u;
    ctx.left_prev = s.Substr(u, i - 1);
  }
  if (j < n) {
    int v = j + 1;
    while (v < n && b.at(v) < kBaseThreshold) ++v;
    ctx.right_next = s.Substr(j + 1, v);
  }
  return ctx;
}

StringFrequency::StringFrequency(std::span<const Sentence> texts) {
  for (const Sentence& s : texts) {
    if (s.empty()) continue;
    text_ += s.chars();
    text_.push_back(kSeparator);
    total_chars_ += s.size();
  }
  const int32_t n = static_cast<int32_t>(text_.size());
  suffixes_.resize(n);
  std::iota(suffixes_.begin(), suffixes_.end(), 0);
  std::vector<int64_t> rank(n);
  std::vector<int64_t> next_rank(n);
  for (int32_t k = 0; k < n; ++k) rank[k] = text_[k];
  // Prefix doubling: sort by (rank[i], rank[i + step]) until ranks are
  // unique.
  for (int32_t step = 1; n > 0; step <<= 1) {
    auto key = [&](int32_t pos) {
      return std::pair<int64_t, int64_t>(
          rank[pos], pos + step < n ? rank[pos + step] : -1);
    };
    std::sort(suffixes_.begin(), suffixes_.end(),
              [&](int32_t a, int32_t b) { return key(a) < key(b); });
    next_rank[suffixes_[0]] = 0;
    for (int32_t k = 1; k < n; ++k) {
      next_rank[suffixes_[k]] =
          next_rank[suffixes_[k - 1]] +
          (key(suffixes_[k - 1]) < key(suffixes_[k]) ? 1 : 0);
    }
    rank.swap(next_rank);
    if (rank[suffixes_[n - 1]] == n - 1) break;
  }
}

int64_t StringFrequency::Count(std::u32string_view s) const {
  if (s.empty()) return 0;
  const std::u32string_view text(text_);
  auto prefix_compare = [&](int32_t pos) {
    return text.substr(pos, s.size()).compare(s);
  };
  auto lo = std::partition_point(
      suffixes_.begin(), suffixes_.end(),
      [&](int32_t pos) { return prefix_compare(pos) < 0; });
  auto hi = std::partition_point(
      lo, suffixes_.end(), [&](int32_t pos) { return prefix_compare(pos) == 0; });
  return hi - lo;
}

int64_t StringFrequency::Count(std::string_view utf8) const {
  auto decoded = utf8::Decode(utf8);
  return decoded ? Count(std::u32string_view(*decoded)) : 0;
}

void TreeFrequencyIndex::AddTree(const SegTree& tree) {
  for (NodeId id = 0; id < tree.num_nodes(); ++id) {
    const std::string text = tree.SpanText(id);
    ++counts_[text];
    const NodeId parent = tree.node(id).parent;
    if (parent != kNoNode) parents_[text].insert(tree.SpanText(parent));
  }
}

int64_t TreeFrequencyIndex::Count(const std::string& s) const {
  auto it = counts_.find(s);
  return it == counts_.end() ? 0 : it->second;
}

const std::unordered_set<std::string>* TreeFrequencyIndex::Parents(
    const std::string& s) const {
  auto it = parents_.find(s);
  return it == parents_.end() ? nullptr : &it->second;
}

double Chi2Assoc(int64_t joint, int64_t left, int64_t right, int64_t total) {
  const int64_t a = joint;
  const int64_t b = left - joint;
  const int64_t c = right - joint;
  const int64_t d = total - a - b - c;
  if (total <= 0 || a < 0 || b < 0 || c < 0 || d < 0) {
    throw ArgumentError("inconsistent contingency counts");
  }
  const double da = static_cast<double>(a);
  const double db = static_cast<double>(b);
  const double dc = static_cast<double>(c);
  const double dd = static_cast<double>(d);
  const double denominator = (da + db) * (da + dc) * (db + dd) * (dc + dd);
  if (denominator == 0.0) return 0.0;
  const double cross = da * dd - db * dc;
  return std::min(1.0, cross * cross / denominator);
}

FeatureVector ExtractFeatures(const NodeContext& ctx,
                              const FeatureSources& sources) {
  FeatureVector f;

  // Base-model confidence.
  f["tagger:b"] = ctx.split_score;
  for (int t = 0; t < kNumTags; ++t) {
    f["tagger:P_m_" + std::string(kTagNames[t])] = ctx.marginals_split[t];
    f["tagger:P_m+1_" + std::string(kTagNames[t])] = ctx.marginals_next[t];
  }

  f["len:l" + LengthBucket(ctx.left_length)] = 1.0;
  f["len:r" + LengthBucket(ctx.right_length)] = 1.0;

  if (sources.lexicon) {
    const Lexicon& lex = *sources.lexicon;
    auto unigram = [&](std::string_view name, const std::string& w) {
      f["dict:" + std::string(name) + (lex.Contains(w) ? "=iv" : "=oov")] =
          1.0;
    };
    unigram("l", ctx.left);
    unigram("r", ctx.right);
    unigram("m", ctx.merged);
    auto bigram = [&](std::string_view name,
                      const std::optional<std::string>& x,
                      const std::optional<std::string>& y) {
      std::string value = "=edge";
      if (x && y) value = lex.ContainsBigram(*x, *y) ? "=iv" : "=oov";
      f["dict:" + std::string(name) + value] = 1.0;
    };
    bigram("lprev_l", ctx.left_prev, ctx.left);
    bigram("l_r", ctx.left, ctx.right);
    bigram("r_rnext", ctx.right, ctx.right_next);
    bigram("lprev_m", ctx.left_prev, ctx.merged);
    bigram("m_rnext", ctx.merged, ctx.right_next);
  }

  if (sources.counts) {
    auto assoc = [&](std::string_view name,
                     const std::optional<std::string>& x,
                     const std::optional<std::string>& y) {
      if (!x || !y) return;
      f["assoc:" + std::string(name)] =
          PairAssociation(*sources.counts, *x, *y);
    };
    assoc("l_r", ctx.left, ctx.right);
    assoc("lprev_l", ctx.left_prev, ctx.left);
    assoc("r_rnext", ctx.right, ctx.right_next);
    assoc("lprev_m", ctx.left_prev, ctx.merged);
    assoc("m_rnext", ctx.merged, ctx.right_next);
  }

  if (sources.tree_index) {
    const TreeFrequencyIndex& index = *sources.tree_index;
    const double log_count = LogTreeCount(index.Count(ctx.merged));
    f["tree:log_freq"] = log_count;
    double ratio = 0.0;
    if (const auto* parents = index.Parents(ctx.merged)) {
      double best = -std::numeric_limits<double>::infinity();
      for (const std::string& p : *parents) {
        best = std::max(best, LogTreeCount(index.Count(p)));
      }
      ratio = log_count - best;
    }
    f["tree:log_ratio"] = ratio;
  }
  return f;
}

std::vector<LabeledSample> CollectSamples(std::span<const Segmentation> corpus,
                                          const BoundaryTagger& tagger) {
  if (corpus.empty()) {
    throw ArgumentError("cannot collect pruning samples from an empty corpus");
  }
  std::vector<LabeledSample> samples;
  for (const Segmentation& gold : corpus) {
    if (gold.sentence().size() < 2) continue;
    const TagMarginals marginals = tagger.Marginals(gold.sentence());
    const SegTree tree = SegTree::Build(BoundaryFromMarginals(marginals));
    for (const auto& node : tree.nodes()) {
      if (node.is_leaf() || !InSampleWindow(node.split_score)) continue;
      samples.push_back({MakeNodeContext(tree, node, marginals),
                         gold.HasBoundary(node.split_gap) ? 0 : 1});
    }
  }
  return samples;
}

double PruneModel::Decision(const FeatureVector& features) const {
  double z = bias_;
  for (const auto& [name, value] : features) {
    auto it = weights_.find(name);
    if (it != weights_.end()) z += it->second * value;
  }
  return z;
}

double PruneModel::MergeProbability(const FeatureVector& features) const {
  return Sigmoid(Decision(features));
}

std::string PruneModel::ToJson(const PrunerResources* resources) const {
  nlohmann::json doc;
  doc["format"] = kPrunerFormat;
  doc["version"] = kPrunerVersion;
  doc["hyperparams"] = {{"epochs", config_.epochs},
                        {"learning_rate", config_.learning_rate},
                        {"l2", config_.l2},
                        {"batch_size", config_.batch_size},
                        {"seed", config_.seed},
                        {"holdout_fraction", config_.holdout_fraction}};
  nlohmann::json inventory = nlohmann::json::array();
  for (const auto& [name, w] : weights_) inventory.push_back(name);
  doc["feature_inventory"] = std::move(inventory);
  doc["weights"] = weights_;
  doc["bias"] = bias_;
  doc["heldout_accuracy"] =
      heldout_accuracy_ ? nlohmann::json(*heldout_accuracy_) : nullptr;
  if (resources) {
    nlohmann::json unigrams = nlohmann::json::array();
    for (const auto& [w, c] : resources->lexicon.SortedUnigrams()) {
      unigrams.push_back({w, c});
    }
    nlohmann::json bigrams = nlohmann::json::array();
    for (const auto& [pair, c] : resources->lexicon.SortedBigrams()) {
      bigrams.push_back({pair.first, pair.second, c});
    }
    nlohmann::json text = nlohmann::json::array();
    for (const Sentence& s : resources->frequency_text) text.push_back(s.Text());
    doc["resources"] = {{"unigrams", std::move(unigrams)},
                        {"bigrams", std::move(bigrams)},
                        {"frequency_text", std::move(text)}};
  }
  return doc.dump(1) + "\n";
}

PruneModel PruneModel::FromJson(std::string_view text,
                                PrunerResources* resources) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("pruner model is not valid JSON: ") +
                      e.what());
  }
  if (doc.value("format", "") != kPrunerFormat) {
    throw FormatError("not a segtree-pruner model");
  }
  if (doc.value("version", -1) != kPrunerVersion) {
    throw FormatError("unsupported pruner model version");
  }
  PruneModel model;
  try {
    const auto& hp = doc.at("hyperparams");
    model.config_.epochs = hp.at("epochs").get<int>();
    model.config_.learning_rate = hp.at("learning_rate").get<double>();
    model.config_.l2 = hp.at("l2").get<double>();
    model.config_.batch_size = hp.at("batch_size").get<int>();
    model.config_.seed = hp.at("seed").get<uint64_t>();
    model.config_.holdout_fraction = hp.at("holdout_fraction").get<double>();
    model.weights_ = doc.at("weights").get<std::map<std::string, double>>();
    model.bias_ = doc.at("bias").get<double>();
    const auto& acc = doc.at("heldout_accuracy");
    if (!acc.is_null()) model.heldout_accuracy_ = acc.get<double>();
    if (resources && doc.contains("resources")) {
      const auto& res = doc.at("resources");
      resources->lexicon = Lexicon();
      for (const auto& entry : res.at("unigrams")) {
        resources->lexicon.AddWord(entry.at(0).get<std::string>(),
                                   entry.at(1).get<int64_t>());
      }
      for (const auto& entry : res.at("bigrams")) {
        resources->lexicon.AddBigram(entry.at(0).get<std::string>(),
                                     entry.at(1).get<std::string>(),
                                     entry.at(2).get<int64_t>());
      }
      resources->frequency_text.clear();
      for (const auto& line : res.at("frequency_text")) {
        resources->frequency_text.push_back(
            Sentence::FromUtf8(line.get<std::string>()));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed pruner model: ") + e.what());
  }
  return model;
}

void PruneModel::Save(const std::string& path,
                      const PrunerResources* resources) const {
  WriteText(path, ToJson(resources));
}

PruneModel PruneModel::Load(const std::string& path,
                            PrunerResources* resources) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJson(buffer.str(), resources);
}

PrunerProblem PrunerProblem::Build(std::span<const PrunerExample> examples) {
  PrunerProblem problem;
  // Sorted feature ids keep the layout independent of example order.
  std::map<std::string, int> index;
  for (const PrunerExample& ex : examples) {
    for (const auto& [name, value] : ex.features) index.emplace(name, 0);
  }
  for (auto& [name, id] : index) {
    id = static_cast<int>(problem.feature_names.size());
    problem.feature_names.push_back(name);
  }
  for (const PrunerExample& ex : examples) {
    std::vector<std::pair<int, double>> row;
    row.reserve(ex.features.size());
    for (const auto& [name, value] : ex.features) {
      if (value != 0.0) row.emplace_back(index.at(name), value);
    }
    problem.rows.push_back(std::move(row));
    problem.labels.push_back(ex.label);
  }
  return problem;
}

double PrunerObjective(const PrunerProblem& problem,
                       std::span<const double> params, double l2,
                       std::vector<double>* gradient) {
  const size_t bias_index = problem.feature_names.size();
  if (gradient) gradient->assign(params.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(problem.rows.size());
  double loss = 0.0;
  for (size_t k = 0; k < problem.rows.size(); ++k) {
    double z = params[bias_index];
    for (const auto& [id, value] : problem.rows[k]) z += params[id] * value;
    const double y = problem.labels[k];
    // -[y log s(z) + (1 - y) log(1 - s(z))]
    loss += (Softplus(z) - y * z) * scale;
    if (gradient) {
      const double residual = (Sigmoid(z) - y) * scale;
      for (const auto& [id, value] : problem.rows[k]) {
        (*gradient)[id] += residual * value;
      }
      (*gradient)[bias_index] += residual;
    }
  }
  for (size_t id = 0; id < bias_index; ++id) {
    loss += 0.5 * l2 * params[id] * params[id];
    if (gradient) (*gradient)[id] += l2 * params[id];
  }
  return loss;
}

PruneModel TrainPruner(std::span<const PrunerExample> examples,
                       const PrunerConfig& config) {
  const bool has_positive = std::any_of(
      examples.begin(), examples.end(), [](const auto& e) { return e.label == 1; });
  const bool has_negative = std::any_of(
      examples.begin(), examples.end(), [](const auto& e) { return e.label == 0; });
  if (!has_positive || !has_negative) {
    throw TrainingError("degenerate label distribution");
  }
  if (config.batch_size < 1) throw ArgumentError("batch size must be >= 1");

  std::mt19937_64 rng(config.seed);
  const auto order = SeededPermutation(examples.size(), rng());
  const auto holdout_size = static_cast<size_t>(
      config.holdout_fraction * static_cast<double>(examples.size()));
  std::vector<PrunerExample> train;
  std::vector<PrunerExample> holdout;
  for (size_t k = 0; k < order.size(); ++k) {
    (k < holdout_size ? holdout : train).push_back(examples[order[k]]);
  }

  const PrunerProblem problem = PrunerProblem::Build(train);
  const size_t bias_index = problem.feature_names.size();
  std::vector<double> params(problem.num_parameters(), 0.0);
  std::vector<double> grad(params.size(), 0.0);
  std::vector<int> touched;
  std::vector<char> is_touched(params.size(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto batch_order = SeededPermutation(problem.rows.size(), rng());
    for (size_t start = 0; start < batch_order.size();
         start += config.batch_size) {
      const size_t stop = std::min(
          batch_order.size(), start + static_cast<size_t>(config.batch_size));
      const double scale = 1.0 / static_cast<double>(stop - start);
      double bias_grad = 0.0;
      for (size_t k = start; k < stop; ++k) {
        const size_t r = batch_order[k];
        double z = params[bias_index];
        for (const auto& [id, value] : problem.rows[r]) z += params[id] * value;
        const double residual = (Sigmoid(z) - problem.labels[r]) * scale;
        for (const auto& [id, value] : problem.rows[r]) {
          if (!is_touched[id]) {
            is_touched[id] = 1;
            touched.push_back(id);
          }
          grad[id] += residual * value;
        }
        bias_grad += residual;
      }
      for (int id : touched) {
        params[id] -= config.learning_rate * (grad[id] + config.l2 * params[id]);
        grad[id] = 0.0;
        is_touched[id] = 0;
      }
      touched.clear();
      params[bias_index] -= config.learning_rate * bias_grad;
    }
  }

  PruneModel model;
  model.set_config(config);
  std::map<std::string, double> weights;
  for (size_t id = 0; id < bias_index; ++id) {
    weights[problem.feature_names[id]] = params[id];
  }
  model.set_weights(std::move(weights));
  model.set_bias(params[bias_index]);
  if (!holdout.empty()) {
    size_t correct = 0;
    for (const PrunerExample& ex : holdout) {
      const int predicted = model.Decision(ex.features) > 0.0 ? 1 : 0;
      if (predicted == ex.label) ++correct;
    }
    model.set_heldout_accuracy(static_cast<double>(correct) /
                               static_cast<double>(holdout.size()));
  }
  return model;
}

PrunePredicate LearnedPredicate(const PruneModel& model,
                                const FeatureSources& sources,
                                const TagMarginals& marginals) {
  return [&model, sources, &marginals](const SegTree& tree,
                                       const SegTree::Node& node) {
    if (!InSampleWindow(node.split_score)) {
      return node.split_score < kBaseThreshold;
    }
    const NodeContext ctx = MakeNodeContext(tree, node, marginals);
    return model.Decision(ExtractFeatures(ctx, sources)) > 0.0;
  };
}

std::string DumpSamples(std::span<const PrunerExample> examples) {
  std::string out;
  for (const PrunerExample& ex : examples) {
    out += std::to_string(ex.label);
    for (const auto& [name, value] : ex.features) {
      out += "\t" + name + "=" + FormatScore(value);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace segtree
