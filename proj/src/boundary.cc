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

#include "segtree/boundary.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"
#include "segtree/utf8.h"

namespace segtree {
namespace {

constexpr std::string_view kTaggerFormat = "segtree-tagger";
constexpr int kTaggerVersion = 1;
constexpr std::string_view kBos = "<s>";
constexpr std::string_view kEos = "</s>";

void Softmax(TagDistribution* z) {
  const double top = *std::max_element(z->begin(), z->end());
  double sum = 0.0;
  for (double& v : *z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : *z) v /= sum;
}

// Characters around `position` as UTF-8, with sentinels past either edge.
std::string Slot(const Sentence& s, int position) {
  if (position < 1) return std::string(kBos);
  if (position > s.size()) return std::string(kEos);
  std::string out;
  utf8::Append(s.at(position), &out);
  return out;
}

}  // namespace

BoundaryScores::BoundaryScores(Sentence s, std::vector<double> values)
    : sentence(std::move(s)), scores(std::move(values)) {
  const size_t expected = sentence.empty() ? 0 : sentence.size() - 1;
  if (scores.size() != expected) {
    throw ArgumentError("expected " + std::to_string(expected) +
                        " scores, got " + std::to_string(scores.size()));
  }
  for (double v : scores) {
    if (!std::isfinite(v)) throw ArgumentError("non-finite boundary score");
  }
}

double NegatedPmi(double p_xy, double p_x, double p_y) {
  return -(std::log(p_xy) - std::log(p_x) - std::log(p_y));
}

SmoothedCharModel::SmoothedCharModel(const CharStats& stats, double alpha)
    : stats_(&stats), alpha_(alpha) {
  const double vocab = static_cast<double>(stats.char_counts.size()) + 1.0;
  unigram_denominator_ = static_cast<double>(stats.total_chars) + alpha * vocab;
  bigram_denominator_ =
      static_cast<double>(stats.total_bigrams) + alpha * vocab * vocab;
}

double SmoothedCharModel::CharProb(char32_t c) const {
  return (static_cast<double>(stats_->CharCount(c)) + alpha_) /
         unigram_denominator_;
}

double SmoothedCharModel::PairProb(char32_t a, char32_t b) const {
  return (static_cast<double>(stats_->BigramCount(a, b)) + alpha_) /
         bigram_denominator_;
}

BoundaryScores PmiScores(const Sentence& sentence, const CharStats& stats,
                         double alpha) {
  const SmoothedCharModel model(stats, alpha);
  std::vector<double> scores;
  for (int i = 1; i < sentence.size(); ++i) {
    const char32_t x = sentence.at(i);
    const char32_t y = sentence.at(i + 1);
    scores.push_back(
        NegatedPmi(model.PairProb(x, y), model.CharProb(x), model.CharProb(y)));
  }
  return BoundaryScores(sentence, std::move(scores));
}

BoundaryScores BoundaryFromMarginals(const TagMarginals& marginals) {
  std::vector<double> scores;
  const int n = marginals.sentence.size();
  for (int i = 1; i < n; ++i) {
    const double b = marginals.prob(i, Tag::kS) + marginals.prob(i, Tag::kE);
    scores.push_back(std::clamp(b, 0.0, 1.0));
  }
  return BoundaryScores(marginals.sentence, std::move(scores));
}

const std::array<std::string_view, kNumTaggerTemplates>& TaggerTemplates() {
  static constexpr std::array<std::string_view, kNumTaggerTemplates> kNames = {
      "C-1", "C0", "C1", "C-2C-1", "C-1C0", "C0C1", "C1C2"};
  return kNames;
}

std::array<std::string, kNumTaggerTemplates> TaggerFeatures(
    const Sentence& sentence, int position) {
  const auto& names = TaggerTemplates();
  const std::string prev2 = Slot(sentence, position - 2);
  const std::string prev = Slot(sentence, position - 1);
  const std::string cur = Slot(sentence, position);
  const std::string next = Slot(sentence, position + 1);
  const std::string next2 = Slot(sentence, position + 2);
  auto f = [&](int t, const std::string& value) {
    return std::string(names[t]) + "=" + value;
  };
  return {f(0, prev),         f(1, cur),         f(2, next),
          f(3, prev2 + prev), f(4, prev + cur), f(5, cur + next),
          f(6, next + next2)};
}

TagMarginals BoundaryTagger::Marginals(const Sentence& sentence) const {
  TagMarginals m;
  m.sentence = sentence;
  m.probs.reserve(sentence.size());
  for (int k = 1; k <= sentence.size(); ++k) {
    TagDistribution z{};
    for (const std::string& f : TaggerFeatures(sentence, k)) {
      if (const TagDistribution* w = Weights(f)) {
        for (int t = 0; t < kNumTags; ++t) z[t] += (*w)[t];
      }
    }
    Softmax(&z);
    m.probs.push_back(z);
  }
  return m;
}

const TagDistribution* BoundaryTagger::Weights(std::string_view feature) const {
  auto it = weights_.find(std::string(feature));
  return it == weights_.end() ? nullptr : &it->second;
}

void BoundaryTagger::SetWeights(const std::string& feature,
                                const TagDistribution& w) {
  weights_[feature] = w;
}

bool BoundaryTagger::operator==(const BoundaryTagger& other) const {
  return weights_ == other.weights_;
}

std::string BoundaryTagger::ToJson() const {
  nlohmann::json doc;
  doc["format"] = kTaggerFormat;
  doc["version"] = kTaggerVersion;
  doc["templates"] = TaggerTemplates();
  doc["tags"] = {"B", "M", "E", "S"};
  doc["hyperparams"] = {{"epochs", config_.epochs},
                        {"learning_rate", config_.learning_rate},
                        {"l2", config_.l2},
                        {"batch_size", config_.batch_size},
                        {"seed", config_.seed}};
  nlohmann::json weights = nlohmann::json::object();
  for (const auto& [feature, w] : weights_) weights[feature] = w;
  doc["weights"] = std::move(weights);
  return doc.dump(1) + "\n";
}

BoundaryTagger BoundaryTagger::FromJson(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("tagger model is not valid JSON: ") +
                      e.what());
  }
  if (doc.value("format", "") != kTaggerFormat) {
    throw FormatError("not a segtree-tagger model");
  }
  if (doc.value("version", -1) != kTaggerVersion) {
    throw FormatError("unsupported tagger model version");
  }
  BoundaryTagger tagger;
  try {
    const auto& hp = doc.at("hyperparams");
    tagger.config_.epochs = hp.at("epochs").get<int>();
    tagger.config_.learning_rate = hp.at("learning_rate").get<double>();
    tagger.config_.l2 = hp.at("l2").get<double>();
    tagger.config_.batch_size = hp.at("batch_size").get<int>();
    tagger.config_.seed = hp.at("seed").get<uint64_t>();
    for (const auto& [feature, w] : doc.at("weights").items()) {
      tagger.weights_[feature] = w.get<TagDistribution>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed tagger model: ") + e.what());
  }
  return tagger;
}

void BoundaryTagger::Save(const std::string& path) const {
  WriteText(path, ToJson());
}

BoundaryTagger BoundaryTagger::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJson(buffer.str());
}

TaggerProblem TaggerProblem::Build(std::span<const Segmentation> corpus) {
  TaggerProblem problem;
  std::unordered_map<std::string, int> index;
  for (const Segmentation& seg : corpus) {
    const auto tags = SegmentationToTags(seg);
    for (int k = 1; k <= seg.sentence().size(); ++k) {
      std::array<int, kNumTaggerTemplates> ids{};
      const auto features = TaggerFeatures(seg.sentence(), k);
      for (int t = 0; t < kNumTaggerTemplates; ++t) {
        auto [it, inserted] = index.try_emplace(
            features[t], static_cast<int>(problem.feature_names.size()));
        if (inserted) problem.feature_names.push_back(features[t]);
        ids[t] = it->second;
      }
      problem.positions.push_back(ids);
      problem.gold.push_back(static_cast<int>(tags[k - 1]));
    }
  }
  return problem;
}

double TaggerObjective(const TaggerProblem& problem,
                       std::span<const double> params, double l2,
                       std::vector<double>* gradient) {
  if (gradient) gradient->assign(params.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(problem.positions.size());
  double loss = 0.0;
  for (size_t p = 0; p < problem.positions.size(); ++p) {
    TagDistribution z{};
    for (int id : problem.positions[p]) {
      for (int t = 0; t < kNumTags; ++t) z[t] += params[id * kNumTags + t];
    }
    Softmax(&z);
    loss -= std::log(z[problem.gold[p]]) * scale;
    if (gradient) {
      for (int id : problem.positions[p]) {
        for (int t = 0; t < kNumTags; ++t) {
          const double target = t == problem.gold[p] ? 1.0 : 0.0;
          (*gradient)[id * kNumTags + t] += (z[t] - target) * scale;
        }
      }
    }
  }
  for (size_t k = 0; k < params.size(); ++k) {
    loss += 0.5 * l2 * params[k] * params[k];
    if (gradient) (*gradient)[k] += l2 * params[k];
  }
  return loss;
}

BoundaryTagger TrainTagger(std::span<const Segmentation> train,
                           const TaggerConfig& config) {
  const TaggerProblem problem = TaggerProblem::Build(train);
  if (problem.positions.empty()) {
    throw ArgumentError("cannot train a tagger on an empty corpus");
  }
  if (config.batch_size < 1) throw ArgumentError("batch size must be >= 1");

  const size_t num_features = problem.feature_names.size();
  std::vector<TagDistribution> w(num_features, TagDistribution{});
  std::vector<TagDistribution> grad(num_features, TagDistribution{});
  std::vector<int> touched;
  std::vector<char> is_touched(num_features, 0);
  std::mt19937_64 rng(config.seed);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = SeededPermutation(problem.positions.size(), rng());
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t stop =
          std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (size_t k = start; k < stop; ++k) {
        const size_t p = order[k];
        TagDistribution z{};
        for (int id : problem.positions[p]) {
          for (int t = 0; t < kNumTags; ++t) z[t] += w[id][t];
        }
        Softmax(&z);
        z[problem.gold[p]] -= 1.0;
        for (int id : problem.positions[p]) {
          if (!is_touched[id]) {
            is_touched[id] = 1;
            touched.push_back(id);
          }
          for (int t = 0; t < kNumTags; ++t) grad[id][t] += z[t] * scale;
        }
      }
      for (int id : touched) {
        for (int t = 0; t < kNumTags; ++t) {
          w[id][t] -= config.learning_rate * (grad[id][t] + config.l2 * w[id][t]);
          grad[id][t] = 0.0;
        }
        is_touched[id] = 0;
      }
      touched.clear();
    }
  }

  BoundaryTagger tagger;
  tagger.set_config(config);
  for (size_t id = 0; id < num_features; ++id) {
    tagger.SetWeights(problem.feature_names[id], w[id]);
  }
  return tagger;
}

BoundaryScores TaggerScores(const BoundaryTagger& tagger,
                            const Sentence& sentence) {
  return BoundaryFromMarginals(tagger.Marginals(sentence));
}

std::vector<BoundaryScores> ParseExternalScores(
    std::span<const std::string> lines, std::span<const Sentence> sentences) {
  if (lines.size() < sentences.size()) {
    throw FormatError("score file has " + std::to_string(lines.size()) +
                      " lines for " + std::to_string(sentences.size()) +
                      " sentences");
  }
  std::vector<BoundaryScores> out;
  out.reserve(sentences.size());
  for (size_t k = 0; k < sentences.size(); ++k) {
    const int line_no = static_cast<int>(k) + 1;
    std::string_view line = lines[k];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<double> values;
    size_t pos = 0;
    while (pos < line.size()) {
      if (line[pos] == ' ') {
        ++pos;
        continue;
      }
      size_t end = line.find(' ', pos);
      if (end == std::string_view::npos) end = line.size();
      const std::string_view token = line.substr(pos, end - pos);
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc() || ptr != token.data() + token.size() ||
          !std::isfinite(value)) {
        throw FormatError("non-numeric score '" + std::string(token) + "'",
                          line_no);
      }
      values.push_back(value);
      pos = end;
    }
    const size_t expected =
        sentences[k].empty() ? 0 : static_cast<size_t>(sentences[k].size() - 1);
    if (values.size() != expected) {
      throw FormatError("expected " + std::to_string(expected) +
                            " scores, found " + std::to_string(values.size()),
                        line_no);
    }
    out.emplace_back(sentences[k], std::move(values));
  }
  for (size_t k = sentences.size(); k < lines.size(); ++k) {
    if (!lines[k].empty()) {
      throw FormatError("score file has more lines than sentences",
                        static_cast<int>(k) + 1);
    }
  }
  return out;
}

std::vector<BoundaryScores> LoadExternalScores(
    const std::string& path, std::span<const Sentence> sentences) {
  const auto lines = ReadLines(path);
  return ParseExternalScores(lines, sentences);
}

std::string FormatScore(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::string FormatScoresLine(const BoundaryScores& scores) {
  std::string line;
  for (size_t k = 0; k < scores.scores.size(); ++k) {
    if (k > 0) line.push_back(' ');
    line += FormatScore(scores.scores[k]);
  }
  return line;
}

}  // namespace segtree
