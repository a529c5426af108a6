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

#include "synthetic_corpus.h"

#include <random>
#include <set>

namespace segtree::testing {
namespace {

uint64_t SplitMix(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int UniformInt(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

}  // namespace

bool MergeRule::Merges(int left, int right) const {
  const uint64_t h = SplitMix(SplitMix(seed) ^ (static_cast<uint64_t>(left) << 32) ^
                              static_cast<uint64_t>(right));
  return static_cast<double>(h >> 11) * 0x1.0p-53 < rate;
}

SyntheticLanguage::SyntheticLanguage(const SyntheticConfig& config)
    : config_(config) {
  std::mt19937_64 rng(config.seed);
  std::set<std::u32string> seen;
  while (static_cast<int>(morphemes_.size()) < config.num_morphemes) {
    const int length = UniformInt(rng, config.min_morpheme_length,
                                  config.max_morpheme_length);
    std::u32string m;
    for (int k = 0; k < length; ++k) {
      m.push_back(0x4E00 + UniformInt(rng, 0, config.alphabet_size - 1));
    }
    if (seen.insert(m).second) morphemes_.push_back(m);
  }
  successors_.resize(morphemes_.size());
  for (auto& next : successors_) {
    for (int k = 0; k < config.successors; ++k) {
      next.push_back(UniformInt(rng, 0, config.num_morphemes - 1));
    }
  }
}

std::vector<MorphemeSequence> SyntheticLanguage::Sample(int count,
                                                        uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::vector<MorphemeSequence> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    const int length =
        UniformInt(rng, config_.min_morphemes, config_.max_morphemes);
    MorphemeSequence seq = {UniformInt(rng, 0, config_.num_morphemes - 1)};
    while (static_cast<int>(seq.size()) < length) {
      const auto& next = successors_[seq.back()];
      seq.push_back(next[UniformInt(rng, 0, static_cast<int>(next.size()) - 1)]);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

Segmentation SyntheticLanguage::Realize(const MorphemeSequence& morphemes,
                                        const MergeRule& rule) const {
  std::u32string chars;
  std::vector<int> gaps;
  size_t k = 0;
  while (k < morphemes.size()) {
    if (!chars.empty()) gaps.push_back(static_cast<int>(chars.size()));
    chars += morphemes_[morphemes[k]];
    if (k + 1 < morphemes.size() && rule.Merges(morphemes[k], morphemes[k + 1])) {
      chars += morphemes_[morphemes[k + 1]];
      k += 2;
    } else {
      k += 1;
    }
  }
  return Segmentation(Sentence(chars), gaps);
}

std::vector<Segmentation> SyntheticLanguage::Realize(
    const std::vector<MorphemeSequence>& seqs, const MergeRule& rule) const {
  std::vector<Segmentation> out;
  out.reserve(seqs.size());
  for (const auto& seq : seqs) out.push_back(Realize(seq, rule));
  return out;
}

}  // namespace segtree::testing
