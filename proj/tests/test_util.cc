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

#include "test_util.h"

#include <algorithm>
#include <set>

namespace segtree::testing {

Sentence Chars(int n) {
  std::u32string chars;
  for (int k = 0; k < n; ++k) chars.push_back(0x4E00 + k);
  return Sentence(chars);
}

Segmentation Seg(const std::string& line) { return ParseSegmentedLine(line); }

BoundaryScores MakeScores(const std::vector<double>& values) {
  return BoundaryScores(Chars(static_cast<int>(values.size()) + 1), values);
}

BoundaryScores MakeScores(const Sentence& sentence,
                          const std::vector<double>& values) {
  return BoundaryScores(sentence, values);
}

std::vector<double> RandomDistinctScores(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> values;
  std::set<double> seen;
  while (static_cast<int>(values.size()) < count) {
    const double v = uniform(rng);
    if (v > 0.0 && seen.insert(v).second) values.push_back(v);
  }
  return values;
}

Segmentation RandomPartition(std::mt19937_64& rng, const Sentence& sentence) {
  std::vector<int> gaps;
  for (int i = 1; i < sentence.size(); ++i) {
    if (rng() & 1) gaps.push_back(i);
  }
  return Segmentation(sentence, gaps);
}

Segmentation DirectThreshold(const BoundaryScores& scores, double t) {
  std::vector<int> gaps;
  for (size_t k = 0; k < scores.scores.size(); ++k) {
    if (scores.scores[k] > t) gaps.push_back(static_cast<int>(k) + 1);
  }
  return Segmentation(scores.sentence, gaps);
}

}  // namespace segtree::testing
