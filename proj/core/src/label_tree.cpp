/*
 * Copyright 2026 The hdc Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hdc/label_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>
#include <utility>

#include "hdc/error.hpp"

namespace hdc {

namespace {

// Editable adjacency form used by the tree transforms. Index 0 is the root.
struct Draft {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> children;

  std::size_t add(std::string label) {
    labels.push_back(std::move(label));
    children.emplace_back();
    return labels.size() - 1;
  }
};

Draft to_draft(const LabelTree& tree) {
  Draft draft;
  for (const LabelNode& n : tree.nodes()) {
    draft.labels.push_back(n.label);
    std::vector<std::size_t> kids;
    kids.reserve(n.children.size());
    for (NodeId c : n.children) kids.push_back(c.index());
    draft.children.push_back(std::move(kids));
  }
  return draft;
}

// Keeps the nodes reachable from index 0 and renumbers them in increasing
// draft-index order, so surviving nodes keep their relative id order.
LabelTree from_draft(const Draft& draft) {
  const std::size_t n = draft.labels.size();
  std::vector<char> reachable(n, 0);
  std::vector<std::size_t> stack{0};
  reachable[0] = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t c : draft.children[i]) {
      if (!reachable[c]) {
        reachable[c] = 1;
        stack.push_back(c);
      }
    }
  }
  std::vector<std::uint32_t> remap(n, std::numeric_limits<std::uint32_t>::max());
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (reachable[i]) remap[i] = next++;
  }
  std::vector<LabelNode> nodes(next);
  for (std::size_t i = 0; i < n; ++i) {
    if (!reachable[i]) continue;
    LabelNode& node = nodes[remap[i]];
    node.id = NodeId{remap[i]};
    node.label = draft.labels[i];
    for (std::size_t c : draft.children[i]) {
      node.children.push_back(NodeId{remap[c]});
      nodes[remap[c]].parent = node.id;
    }
  }
  return LabelTree::from_nodes(std::move(nodes));
}

}  // namespace

LabelTree LabelTree::from_nodes(std::vector<LabelNode> nodes) {
  if (nodes.empty()) throw StructureError("empty tree");
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].id.index() != i) {
      throw StructureError("node ids must be dense: position " + std::to_string(i) +
                           " holds id " + std::to_string(nodes[i].id.value));
    }
    if (nodes[i].label.empty()) {
      throw StructureError("node " + std::to_string(i) + " has an empty label");
    }
  }
  if (nodes[0].parent) throw StructureError("root node 0 must not have a parent");
  if (nodes[0].children.empty()) {
    throw StructureError("tree has no classes: the root has no children");
  }

  std::vector<int> parent_refs(n, 0);
  for (const LabelNode& node : nodes) {
    std::unordered_set<std::string_view> sibling_labels;
    for (NodeId c : node.children) {
      if (c.index() >= n) {
        throw StructureError("node '" + node.label + "' lists unknown child id " +
                             std::to_string(c.value));
      }
      if (c == node.id) throw StructureError("node '" + node.label + "' is its own child");
      if (++parent_refs[c.index()] > 1) {
        throw StructureError("node '" + nodes[c.index()].label +
                             "' is listed as a child more than once");
      }
      if (nodes[c.index()].parent != node.id) {
        throw StructureError("parent link of '" + nodes[c.index()].label +
                             "' does not match its parent '" + node.label + "'");
      }
      if (!sibling_labels.insert(nodes[c.index()].label).second) {
        throw StructureError("duplicate label '" + nodes[c.index()].label + "' under '" +
                             node.label + "'");
      }
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (parent_refs[i] == 0) {
      throw StructureError("node '" + nodes[i].label + "' has no parent (multiple roots)");
    }
  }

  LabelTree tree;
  tree.depths_.assign(n, -1);
  tree.depths_[0] = 0;
  std::size_t visited = 0;
  // Preorder walk: children pushed in reverse so they pop in list order.
  std::vector<NodeId> stack{kRootId};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    ++visited;
    const LabelNode& node = nodes[id.index()];
    if (node.is_leaf()) {
      tree.leaves_.push_back(id);
      if (!tree.leaf_index_.emplace(node.label, id).second) {
        throw StructureError("duplicate class label '" + node.label + "'");
      }
      tree.depth_ = std::max(tree.depth_, tree.depths_[id.index()]);
    }
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) {
      if (tree.depths_[it->index()] >= 0) {
        throw StructureError("cycle through node '" + nodes[it->index()].label + "'");
      }
      tree.depths_[it->index()] = tree.depths_[id.index()] + 1;
      stack.push_back(*it);
    }
  }
  if (visited != n) throw StructureError("cycle: some nodes are unreachable from the root");
  tree.nodes_ = std::move(nodes);
  return tree;
}

const LabelNode& LabelTree::node(NodeId id) const {
  if (!contains(id)) throw LookupError("unknown node id " + std::to_string(id.value));
  return nodes_[id.index()];
}

int LabelTree::node_depth(NodeId id) const {
  node(id);
  return depths_[id.index()];
}

std::optional<NodeId> LabelTree::find_leaf(std::string_view label) const {
  const auto it = leaf_index_.find(std::string(label));
  if (it == leaf_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeId> LabelTree::find_label(std::string_view label) const {
  std::vector<NodeId> out;
  for (const LabelNode& n : nodes_) {
    if (n.label == label) out.push_back(n.id);
  }
  return out;
}

std::vector<NodeId> LabelTree::preorder() const { return preorder(kRootId); }

std::vector<NodeId> LabelTree::preorder(NodeId from) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{from};
  node(from);
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    out.push_back(id);
    const auto& kids = nodes_[id.index()].children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::vector<NodeId> LabelTree::descendant_leaves(NodeId id) const {
  std::vector<NodeId> out;
  for (NodeId n : preorder(id)) {
    if (nodes_[n.index()].is_leaf()) out.push_back(n);
  }
  return out;
}

bool LabelTree::is_ancestor_or_self(NodeId ancestor, NodeId id) const {
  node(ancestor);
  std::optional<NodeId> cur = id;
  node(id);
  while (cur) {
    if (*cur == ancestor) return true;
    cur = nodes_[cur->index()].parent;
  }
  return false;
}

NodeId LabelTree::lowest_common_ancestor(NodeId a, NodeId b) const {
  int da = node_depth(a);
  int db = node_depth(b);
  while (da > db) {
    a = *nodes_[a.index()].parent;
    --da;
  }
  while (db > da) {
    b = *nodes_[b.index()].parent;
    --db;
  }
  while (a != b) {
    a = *nodes_[a.index()].parent;
    b = *nodes_[b.index()].parent;
  }
  return a;
}

int LabelTree::distance(NodeId a, NodeId b) const {
  const NodeId lca = lowest_common_ancestor(a, b);
  return depths_[a.index()] + depths_[b.index()] - 2 * depths_[lca.index()];
}

NodeId TreeBuilder::add_root(std::string label) {
  if (!nodes_.empty()) throw InvalidArgument("tree builder already has a root");
  nodes_.push_back(LabelNode{kRootId, std::move(label), std::nullopt, {}});
  return kRootId;
}

NodeId TreeBuilder::add_child(NodeId parent, std::string label) {
  if (parent.index() >= nodes_.size()) {
    throw LookupError("unknown parent id " + std::to_string(parent.value));
  }
  const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back(LabelNode{id, std::move(label), parent, {}});
  nodes_[parent.index()].children.push_back(id);
  return id;
}

LabelTree TreeBuilder::build() const { return LabelTree::from_nodes(nodes_); }

std::vector<NodeId> effective_children(const LabelTree& tree, NodeId id) {
  const LabelNode& node = tree.node(id);
  if (node.is_leaf()) return {id};
  return node.children;
}

LabelTree limit_depth(const LabelTree& tree, int max_depth) {
  if (max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
  if (max_depth >= tree.depth()) return tree;
  Draft draft = to_draft(tree);
  for (NodeId id : tree.preorder()) {
    if (tree.node_depth(id) != max_depth - 1 || tree.is_leaf(id)) continue;
    std::vector<std::size_t> flattened;
    for (NodeId c : tree.children(id)) {
      for (NodeId leaf : tree.descendant_leaves(c)) flattened.push_back(leaf.index());
    }
    draft.children[id.index()] = std::move(flattened);
  }
  return from_draft(draft);
}

std::vector<NodeId> descend_to_level(const LabelTree& tree, int level) {
  if (level < 1 || level > tree.depth()) {
    throw InvalidArgument("level " + std::to_string(level) + " out of range [1, " +
                          std::to_string(tree.depth()) + "]");
  }
  const int target = level - 1;
  std::vector<NodeId> out;
  std::vector<NodeId> stack{tree.root()};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const int d = tree.node_depth(id);
    if (d == target || tree.is_leaf(id)) {
      out.push_back(id);
      continue;
    }
    const auto kids = tree.children(id);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

LabelTree remove_class(const LabelTree& tree, std::string_view label) {
  const std::optional<NodeId> leaf = tree.find_leaf(label);
  if (!leaf) {
    if (!tree.find_label(label).empty()) {
      throw InvalidArgument("'" + std::string(label) + "' is an internal node, not a class");
    }
    throw LookupError("unknown class '" + std::string(label) + "'");
  }
  Draft draft = to_draft(tree);
  NodeId cur = *leaf;
  while (cur != tree.root()) {
    const NodeId parent = *tree.parent(cur);
    auto& kids = draft.children[parent.index()];
    kids.erase(std::find(kids.begin(), kids.end(), cur.index()));
    if (!kids.empty()) break;
    cur = parent;
  }
  if (draft.children[0].empty()) throw StructureError("cannot remove the last class");
  return from_draft(draft);
}

namespace {

double mean_probe_error(const GreedyProbe& probe, const SampleSet& samples,
                        std::string_view label) {
  const Prompt prompt = render_prompt(probe.prompt_template, label);
  double sum = 0.0;
  for (const ImageRef& image : probe.images) {
    for (const SamplePoint& s : samples.samples) {
      sum += score_checked(*probe.scorer, ScoreRequest{image, prompt, s});
    }
  }
  return sum / static_cast<double>(probe.images.size() * samples.size());
}

}  // namespace

LabelTree insert_class(const LabelTree& tree, std::string_view label, InsertMode mode,
                       const std::optional<GreedyProbe>& probe) {
  if (label.empty()) throw InvalidArgument("class label must be non-empty");
  if (tree.find_leaf(label)) {
    throw InvalidArgument("duplicate class label '" + std::string(label) + "'");
  }
  NodeId parent = tree.root();
  if (mode == InsertMode::kGreedy) {
    if (!probe || probe->scorer == nullptr || probe->images.empty()) {
      throw InvalidArgument("greedy insertion needs a scorer and at least one probe image");
    }
    if (probe->samples_per_node < 1) throw InvalidArgument("samples_per_node must be >= 1");
    const SampleSet samples = build_sample_set(probe->seed, probe->samples_per_node, probe->t_max);
    for (;;) {
      std::vector<NodeId> internal;
      for (NodeId c : tree.children(parent)) {
        if (!tree.is_leaf(c)) internal.push_back(c);
      }
      if (internal.empty()) break;
      std::sort(internal.begin(), internal.end());
      NodeId best = internal.front();
      double best_error = std::numeric_limits<double>::infinity();
      for (NodeId c : internal) {
        const double e = mean_probe_error(*probe, samples, tree.label(c));
        if (e < best_error) {
          best_error = e;
          best = c;
        }
      }
      parent = best;
    }
  }
  Draft draft = to_draft(tree);
  const std::size_t added = draft.add(std::string(label));
  draft.children[parent.index()].push_back(added);
  return from_draft(draft);
}

TreeStats tree_stats(const LabelTree& tree) {
  TreeStats stats;
  stats.depth = tree.depth();
  stats.nodes = tree.size();
  stats.leaves = tree.leaf_count();
  stats.internal = tree.size() - tree.leaf_count();
  for (const LabelNode& n : tree.nodes()) {
    if (n.is_leaf()) {
      ++stats.leaves_per_depth[tree.node_depth(n.id)];
    } else {
      ++stats.branching[n.children.size()];
    }
  }
  return stats;
}

}  // namespace hdc
