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

#include "segtree/pruning.h"

#include <string>
#include <utility>

namespace segtree {

PrunePredicate ThresholdPredicate(double t) {
  return [t](const SegTree&, const SegTree::Node& node) {
    return node.split_score < t;
  };
}

PrunePredicate DictionaryPredicate(const Lexicon& lex) {
  return [&lex](const SegTree& tree, const SegTree::Node& node) {
    return lex.Contains(tree.sentence().Substr(node.span.begin, node.span.end));
  };
}

PrunePredicate OraclePredicate(Segmentation gold) {
  return [gold = std::move(gold)](const SegTree& tree,
                                  const SegTree::Node& node) {
    if (!(tree.sentence() == gold.sentence())) {
      throw ArgumentError("oracle gold standard is over a different sentence");
    }
    return !gold.HasBoundary(node.split_gap);
  };
}

Strategy ParseStrategy(std::string_view name) {
  if (name == "tdtp") return Strategy::kTopDown;
  if (name == "butp") return Strategy::kBottomUp;
  throw ArgumentError("unknown pruning strategy '" + std::string(name) +
                      "' (expected tdtp or butp)");
}

std::string_view StrategyName(Strategy strategy) {
  return strategy == Strategy::kTopDown ? "tdtp" : "butp";
}

PrunedTree::PrunedTree(SegTree tree, std::vector<char> kept)
    : tree_(std::move(tree)), kept_(std::move(kept)) {}

bool PrunedTree::is_word(NodeId id) const {
  if (!is_kept(id)) return false;
  const auto& node = tree_.node(id);
  return node.is_leaf() || !is_kept(node.left);
}

std::vector<Span> PrunedTree::WordSpans() const {
  // Preorder storage visits frontier nodes left to right.
  std::vector<Span> spans;
  for (NodeId id = 0; id < tree_.num_nodes(); ++id) {
    if (is_word(id)) spans.push_back(tree_.node(id).span);
  }
  return spans;
}

Segmentation PrunedTree::ToSegmentation() const {
  const auto spans = WordSpans();
  return Segmentation::FromSpans(tree_.sentence(), spans);
}

PrunedTree Tdtp(const SegTree& tree, const PrunePredicate& predicate) {
  std::vector<char> kept(tree.num_nodes(), 0);
  std::vector<NodeId> stack = {tree.root()};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    kept[id] = 1;
    const auto& node = tree.node(id);
    if (node.is_leaf() || predicate(tree, node)) continue;
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return PrunedTree(tree, std::move(kept));
}

PrunedTree Butp(const SegTree& tree, const PrunePredicate& predicate) {
  const int count = tree.num_nodes();
  // single[id]: the subtree at id ended as one word.
  std::vector<char> single(count, 0);
  // Children follow their parent in preorder, so a reverse scan is a valid
  // postorder for this purpose.
  for (NodeId id = count - 1; id >= 0; --id) {
    const auto& node = tree.node(id);
    if (node.is_leaf()) {
      single[id] = 1;
    } else {
      single[id] =
          single[node.left] && single[node.right] && predicate(tree, node);
    }
  }
  std::vector<char> kept(count, 0);
  std::vector<NodeId> stack = {tree.root()};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    kept[id] = 1;
    const auto& node = tree.node(id);
    if (single[id]) continue;
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return PrunedTree(tree, std::move(kept));
}

PrunedTree Prune(const SegTree& tree, const PrunePredicate& predicate,
                 Strategy strategy) {
  return strategy == Strategy::kTopDown ? Tdtp(tree, predicate)
                                        : Butp(tree, predicate);
}

Segmentation Segment(const BoundaryScores& scores,
                     const PrunePredicate& predicate, Strategy strategy) {
  if (scores.sentence.empty()) return Segmentation();
  return Prune(SegTree::Build(scores), predicate, strategy).ToSegmentation();
}

}  // namespace segtree
