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

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "hdc/error.hpp"
#include "hdc/label_tree.hpp"

namespace hdc {

namespace {

using nlohmann::json;

LabelTree load_json_adjacency(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("tree JSON: ") + e.what());
  }
  const json* entries = &doc;
  if (doc.is_object() && doc.contains("nodes")) entries = &doc.at("nodes");
  if (!entries->is_array()) throw ParseError("tree JSON: expected an array of nodes");
  if (entries->empty()) throw StructureError("empty tree");

  struct Entry {
    std::int64_t id;
    std::string label;
    std::vector<std::int64_t> children;
  };
  std::vector<Entry> parsed;
  parsed.reserve(entries->size());
  try {
    for (const json& e : *entries) {
      Entry entry{e.at("id").get<std::int64_t>(), e.at("label").get<std::string>(), {}};
      if (e.contains("children")) {
        entry.children = e.at("children").get<std::vector<std::int64_t>>();
      }
      parsed.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("tree JSON: ") + e.what());
  }

  std::unordered_map<std::int64_t, std::size_t> position;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (!position.emplace(parsed[i].id, i).second) {
      throw StructureError("duplicate node id " + std::to_string(parsed[i].id));
    }
  }
  std::vector<std::optional<std::size_t>> parent_of(parsed.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    for (std::int64_t c : parsed[i].children) {
      const auto it = position.find(c);
      if (it == position.end()) {
        throw StructureError("node '" + parsed[i].label + "' lists unknown child id " +
                             std::to_string(c));
      }
      if (parent_of[it->second]) {
        throw StructureError("node '" + parsed[it->second].label + "' (id " +
                             std::to_string(c) + ") has more than one parent");
      }
      parent_of[it->second] = i;
    }
  }
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (!parent_of[i]) roots.push_back(i);
  }
  if (roots.empty()) throw StructureError("cycle: every node has a parent, so there is no root");
  if (roots.size() > 1) {
    throw StructureError("multiple roots: '" + parsed[roots[0]].label + "' and '" +
                         parsed[roots[1]].label + "'");
  }

  // Root first, everything else in document order.
  std::vector<std::uint32_t> new_id(parsed.size());
  std::uint32_t next = 1;
  for (std::size_t i = 0; i < parsed.size(); ++i) new_id[i] = i == roots[0] ? 0 : next++;

  std::vector<LabelNode> nodes(parsed.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    LabelNode& node = nodes[new_id[i]];
    node.id = NodeId{new_id[i]};
    node.label = std::move(parsed[i].label);
    if (parent_of[i]) node.parent = NodeId{new_id[*parent_of[i]]};
    for (std::int64_t c : parsed[i].children) node.children.push_back(NodeId{new_id[position[c]]});
  }
  return LabelTree::from_nodes(std::move(nodes));
}

LabelTree load_indented_text(std::istream& in) {
  std::vector<LabelNode> nodes;
  std::vector<NodeId> open;  // open[k] is the current node at indent k
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t indent = 0;
    while (indent < line.size() && line[indent] == '\t') ++indent;
    if (line[indent] == ' ') {
      throw ParseError("line " + std::to_string(line_no) + ": indent with tabs, not spaces");
    }
    std::string label = line.substr(indent);
    label.erase(label.find_last_not_of(" \t") + 1);
    if (nodes.empty() && indent != 0) {
      throw ParseError("line " + std::to_string(line_no) + ": first node must not be indented");
    }
    if (!nodes.empty() && indent == 0) {
      throw StructureError("line " + std::to_string(line_no) + ": multiple roots");
    }
    if (indent > open.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": indent jumps more than one level");
    }
    const NodeId id{static_cast<std::uint32_t>(nodes.size())};
    std::optional<NodeId> parent;
    if (indent > 0) {
      parent = open[indent - 1];
      nodes[parent->index()].children.push_back(id);
    }
    nodes.push_back(LabelNode{id, std::move(label), parent, {}});
    open.resize(indent);
    open.push_back(id);
  }
  if (nodes.empty()) throw StructureError("empty tree");
  return LabelTree::from_nodes(std::move(nodes));
}

}  // namespace

TreeFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? TreeFormat::kJsonAdjacency : TreeFormat::kIndentedText;
}

LabelTree load_tree(std::istream& in, TreeFormat format) {
  return format == TreeFormat::kJsonAdjacency ? load_json_adjacency(in) : load_indented_text(in);
}

LabelTree load_tree_file(const std::filesystem::path& path, std::optional<TreeFormat> format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open tree file " + path.string());
  return load_tree(in, format.value_or(format_from_path(path)));
}

void save_tree(std::ostream& out, const LabelTree& tree, TreeFormat format) {
  if (format == TreeFormat::kIndentedText) {
    for (NodeId id : tree.preorder()) {
      out << std::string(static_cast<std::size_t>(tree.node_depth(id)), '\t') << tree.label(id)
          << '\n';
    }
    return;
  }
  out << "[\n";
  for (const LabelNode& n : tree.nodes()) {
    nlohmann::ordered_json children = nlohmann::ordered_json::array();
    for (NodeId c : n.children) children.push_back(c.value);
    const nlohmann::ordered_json entry = {{"id", n.id.value}, {"label", n.label}, {"children", children}};
    out << "  " << entry.dump() << (n.id.index() + 1 < tree.size() ? ",\n" : "\n");
  }
  out << "]\n";
}

void save_tree_file(const std::filesystem::path& path, const LabelTree& tree,
                    std::optional<TreeFormat> format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write tree file " + path.string());
  save_tree(out, tree, format.value_or(format_from_path(path)));
  if (!out) throw IoError("failed writing tree file " + path.string());
}

}  // namespace hdc
