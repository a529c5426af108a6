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

#include "segtree/tree.h"

#include <algorithm>
#include <limits>
#include <utility>

namespace segtree {

SegTree SegTree::Build(const BoundaryScores& scores) {
  const int n = scores.num_chars();
  if (n < 1) throw ArgumentError("cannot build a tree over an empty sentence");

  SegTree tree;
  tree.scores_ = scores;
  tree.nodes_.reserve(2 * n - 1);

  struct Pending {
    Span span;
    NodeId parent;
    bool is_left;
  };
  std::vector<Pending> stack = {{{1, n}, kNoNode, false}};
  while (!stack.empty()) {
    const Pending item = stack.back();
    stack.pop_back();

    const NodeId id = static_cast<NodeId>(tree.nodes_.size());
    Node node;
    node.span = item.span;
    node.parent = item.parent;
    if (item.parent != kNoNode) {
      Node& parent = tree.nodes_[item.parent];
      node.depth = parent.depth + 1;
      (item.is_left ? parent.left : parent.right) = id;
    }
    if (item.span.length() > 1) {
      int best = item.span.begin;
      for (int gap = item.span.begin + 1; gap < item.span.end; ++gap) {
        if (scores.at(gap) > scores.at(best)) best = gap;
      }
      node.split_gap = best;
      node.split_score = scores.at(best);
      // Right first so that the left child is popped next (preorder).
      stack.push_back({{best + 1, item.span.end}, id, false});
      stack.push_back({{item.span.begin, best}, id, true});
    }
    tree.nodes_.push_back(node);
  }
  return tree;
}

std::string SegTree::Dump() const {
  std::string out;
  for (const Node& node : nodes_) {
    out.append(2 * node.depth, ' ');
    out += std::to_string(node.span.begin) + " " +
           std::to_string(node.span.end) + " ";
    if (node.is_leaf()) {
      out += "L";
    } else {
      out += std::to_string(node.split_gap) + " " +
             FormatScore(node.split_score);
    }
    out.push_back('\n');
  }
  return out;
}

SpanSet NodeSpans(const SegTree& tree) {
  SpanSet spans;
  for (const auto& node : tree.nodes()) spans.insert(node.span);
  return spans;
}

SpanSet WordCandidates(const BoundaryScores& scores) {
  const int n = scores.num_chars();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  SpanSet out;
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; ++j) {
      const double left = i == 1 ? kInf : scores.at(i - 1);
      const double right = j == n ? kInf : scores.at(j);
      double inner = -kInf;
      for (int g = i; g < j; ++g) inner = std::max(inner, scores.at(g));
      if (std::min(left, right) > inner) out.insert({i, j});
    }
  }
  return out;
}

Segmentation LeavesToSegmentation(const SegTree& tree) {
  std::vector<int> gaps;
  for (int i = 1; i < tree.sentence().size(); ++i) gaps.push_back(i);
  return Segmentation(tree.sentence(), std::move(gaps));
}

}  // namespace segtree
