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

// Pruning predicates and the two traversals that turn their (possibly
// conflicting) per-node decisions into a segmentation.

#ifndef SEGTREE_PRUNING_H_
#define SEGTREE_PRUNING_H_

#include <functional>
#include <string_view>
#include <vector>

#include "segtree/corpus.h"
#include "segtree/tree.h"

namespace segtree {

// Decides for an internal node whether its two children merge into one word
// (true) or the split is kept (false). Receives the whole tree so that
// context-aware predicates can look beyond the node.
using PrunePredicate =
    std::function<bool(const SegTree& tree, const SegTree::Node& node)>;

// Merge iff split_score < t. Equality keeps the split.
PrunePredicate ThresholdPredicate(double t);

// Merge iff the node's text is a unigram of `lex`. `lex` must outlive the
// predicate.
PrunePredicate DictionaryPredicate(const Lexicon& lex);

// Merge iff the node's split gap is not a boundary of `gold`. The returned
// predicate throws ArgumentError when applied to a tree over a different
// sentence.
PrunePredicate OraclePredicate(Segmentation gold);

enum class Strategy { kTopDown, kBottomUp };

// "tdtp" or "butp"; throws ArgumentError otherwise.
Strategy ParseStrategy(std::string_view name);
std::string_view StrategyName(Strategy strategy);

// A tree together with the connected top fragment that survives pruning.
// The fragment's frontier tiles the sentence; each frontier node is a word.
class PrunedTree {
 public:
  PrunedTree(SegTree tree, std::vector<char> kept);

  const SegTree& tree() const { return tree_; }
  bool is_kept(NodeId id) const { return kept_[id] != 0; }
  // Kept and has no kept children.
  bool is_word(NodeId id) const;

  // Frontier spans, left to right.
  std::vector<Span> WordSpans() const;
  Segmentation ToSegmentation() const;

 private:
  SegTree tree_;
  std::vector<char> kept_;
};

// Top-down: from the root, a node the predicate merges becomes one word and
// its subtree is not visited; otherwise both children are processed.
PrunedTree Tdtp(const SegTree& tree, const PrunePredicate& predicate);

// Bottom-up: a node becomes one word iff both children ended up as single
// words and the predicate merges it.
PrunedTree Butp(const SegTree& tree, const PrunePredicate& predicate);

PrunedTree Prune(const SegTree& tree, const PrunePredicate& predicate,
                 Strategy strategy);

// Build, prune, read off the leaves. An empty sentence yields an empty
// segmentation.
Segmentation Segment(const BoundaryScores& scores,
                     const PrunePredicate& predicate, Strategy strategy);

}  // namespace segtree

#endif  // SEGTREE_PRUNING_H_
