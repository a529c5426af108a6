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

#ifndef SEGTREE_TREE_H_
#define SEGTREE_TREE_H_

#include <set>
#include <string>
#include <vector>

#include "segtree/boundary.h"
#include "segtree/corpus.h"

namespace segtree {

using NodeId = int;
inline constexpr NodeId kNoNode = -1;

// Full binary tree over a sentence, built by splitting every span of two or
// more characters at its highest-scoring interior gap (leftmost on ties).
// A sentence of n characters yields n leaves and 2n - 1 nodes. Nodes are
// stored in preorder; the root is node 0.
class SegTree {
 public:
  struct Node {
    Span span;
    int split_gap = 0;  // 0 for leaves
    double split_score = 0.0;
    NodeId left = kNoNode;
    NodeId right = kNoNode;
    NodeId parent = kNoNode;
    int depth = 0;

    bool is_leaf() const { return left == kNoNode; }
  };

  // Throws ArgumentError for an empty sentence.
  static SegTree Build(const BoundaryScores& scores);

  const Sentence& sentence() const { return scores_.sentence; }
  const BoundaryScores& scores() const { return scores_; }

  NodeId root() const { return 0; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }

  std::string SpanText(NodeId id) const {
    return sentence().Substr(nodes_[id].span.begin, nodes_[id].span.end);
  }

  // One node per line, indented two spaces per depth level. Internal nodes
  // print "begin end split_gap split_score"; leaves print "begin end L".
  std::string Dump() const;

 private:
  BoundaryScores scores_;
  std::vector<Node> nodes_;
};

inline SegTree BuildTree(const BoundaryScores& scores) {
  return SegTree::Build(scores);
}

using SpanSet = std::set<Span>;

SpanSet NodeSpans(const SegTree& tree);

// Brute-force enumeration of word candidates: spans whose two bounding gaps
// (sentence edges count as +infinity) both score strictly higher than every
// gap inside the span. O(n^2) spans, O(n) each.
SpanSet WordCandidates(const BoundaryScores& scores);

// The leaves of an unpruned tree: every character its own word.
Segmentation LeavesToSegmentation(const SegTree& tree);

}  // namespace segtree

#endif  // SEGTREE_TREE_H_
