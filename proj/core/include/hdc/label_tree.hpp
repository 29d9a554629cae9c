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

#ifndef HDC_LABEL_TREE_HPP_
#define HDC_LABEL_TREE_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hdc/scoring.hpp"

namespace hdc {

// Dense node identifier; the root is always 0.
struct NodeId {
  std::uint32_t value = 0;

  constexpr std::size_t index() const { return value; }
  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

inline constexpr NodeId kRootId{0};

struct LabelNode {
  NodeId id;
  std::string label;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;

  bool is_leaf() const { return children.empty(); }
};

// An immutable, validated label hierarchy. Leaves are the classes; internal
// nodes are synsets. Every mutating operation returns a new tree.
class LabelTree {
 public:
  // Validates the node table and throws StructureError on any violation:
  // ids must be dense with nodes[i].id == i, node 0 is the only parentless
  // node, parent/children links must agree, every node must be reachable from
  // the root, sibling labels must be distinct and leaf labels globally unique.
  static LabelTree from_nodes(std::vector<LabelNode> nodes);

  NodeId root() const { return kRootId; }
  // Maximum root-to-leaf edge count.
  int depth() const { return depth_; }
  std::size_t leaf_count() const { return leaves_.size(); }
  std::size_t size() const { return nodes_.size(); }

  bool contains(NodeId id) const { return id.index() < nodes_.size(); }
  // Throws LookupError for unknown ids.
  const LabelNode& node(NodeId id) const;
  const std::string& label(NodeId id) const { return node(id).label; }
  std::span<const NodeId> children(NodeId id) const { return node(id).children; }
  std::optional<NodeId> parent(NodeId id) const { return node(id).parent; }
  bool is_leaf(NodeId id) const { return node(id).is_leaf(); }
  // Edge count from the root.
  int node_depth(NodeId id) const;

  std::span<const LabelNode> nodes() const { return nodes_; }
  // Leaves in preorder.
  std::span<const NodeId> leaves() const { return leaves_; }
  std::optional<NodeId> find_leaf(std::string_view label) const;
  std::vector<NodeId> find_label(std::string_view label) const;

  std::vector<NodeId> preorder() const;
  std::vector<NodeId> preorder(NodeId from) const;
  std::vector<NodeId> descendant_leaves(NodeId id) const;
  bool is_ancestor_or_self(NodeId ancestor, NodeId node) const;
  NodeId lowest_common_ancestor(NodeId a, NodeId b) const;
  // Number of edges on the path between two nodes.
  int distance(NodeId a, NodeId b) const;

 private:
  LabelTree() = default;

  std::vector<LabelNode> nodes_;
  std::vector<int> depths_;
  std::vector<NodeId> leaves_;
  std::unordered_map<std::string, NodeId> leaf_index_;
  int depth_ = 0;
};

// Incremental construction: the first node added is the root.
class TreeBuilder {
 public:
  NodeId add_root(std::string label);
  NodeId add_child(NodeId parent, std::string label);
  LabelTree build() const;

 private:
  std::vector<LabelNode> nodes_;
};

enum class TreeFormat { kJsonAdjacency, kIndentedText };

// .json selects JSON adjacency; anything else the indented-text format.
TreeFormat format_from_path(const std::filesystem::path& path);

// JSON adjacency is an array (or an object with a "nodes" array) of
// {"id": int, "label": str, "children": [int]}. Indented text is one label per
// line with one tab per level. Ids are reassigned in document order with the
// root at 0. Throws ParseError for malformed text, StructureError for invalid
// trees.
LabelTree load_tree(std::istream& in, TreeFormat format);
LabelTree load_tree_file(const std::filesystem::path& path,
                         std::optional<TreeFormat> format = std::nullopt);
void save_tree(std::ostream& out, const LabelTree& tree, TreeFormat format);
void save_tree_file(const std::filesystem::path& path, const LabelTree& tree,
                    std::optional<TreeFormat> format = std::nullopt);

// Children(n), with Children(leaf) = {leaf} so traversal handles unbalanced
// trees. Never empty.
std::vector<NodeId> effective_children(const LabelTree& tree, NodeId id);

// Flattens the tree so no leaf sits deeper than max_depth: deeper leaves move
// under their ancestor at depth max_depth - 1 and the internal nodes between
// are dropped. The class set is preserved exactly.
LabelTree limit_depth(const LabelTree& tree, int max_depth);

// Traversal start set for `level` (1-based, level 1 is the root): all nodes at
// depth level - 1 plus every shallower leaf, in preorder. The effective
// children of the result cover each class exactly once.
std::vector<NodeId> descend_to_level(const LabelTree& tree, int level);

// Removes a class leaf and every ancestor left without children.
LabelTree remove_class(const LabelTree& tree, std::string_view label);

enum class InsertMode { kUnderRoot, kGreedy };

// Data the greedy insertion scores against: images of the new class, scored
// with each candidate synset's prompt on a fixed sample set.
struct GreedyProbe {
  const Scorer* scorer = nullptr;
  std::vector<ImageRef> images;
  int samples_per_node = 4;
  std::uint64_t seed = 0;
  int t_max = kDefaultTMax;
  std::string prompt_template{kDefaultPromptTemplate};
};

// Adds a new class leaf. Greedy mode walks down from the root, at each step
// moving into the internal child with the lowest mean probe error (ties to
// the lowest id), and attaches the leaf under the first node that has no
// internal children.
LabelTree insert_class(const LabelTree& tree, std::string_view label, InsertMode mode,
                       const std::optional<GreedyProbe>& probe = std::nullopt);

struct TreeStats {
  int depth = 0;
  std::size_t nodes = 0;
  std::size_t leaves = 0;
  std::size_t internal = 0;
  // children count -> number of internal nodes with that fan-out
  std::map<std::size_t, std::size_t> branching;
  // depth -> number of leaves at that depth
  std::map<int, std::size_t> leaves_per_depth;
};

TreeStats tree_stats(const LabelTree& tree);

}  // namespace hdc

template <>
struct std::hash<hdc::NodeId> {
  std::size_t operator()(const hdc::NodeId& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

#endif  // HDC_LABEL_TREE_HPP_
