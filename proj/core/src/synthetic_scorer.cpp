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

#include "hdc/synthetic_scorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdc/error.hpp"
#include "hdc/hashing.hpp"

namespace hdc {

namespace {

constexpr double kBetaStart = 1e-4;
constexpr double kBetaEnd = 0.02;

std::vector<double> make_alpha_bar(const SyntheticScorerConfig& config) {
  std::vector<double> table(static_cast<std::size_t>(config.t_max) + 1, 1.0);
  if (config.schedule == AlphaBarSchedule::kConstant) {
    std::fill(table.begin() + 1, table.end(), config.constant_alpha_bar);
    return table;
  }
  double product = 1.0;
  for (int t = 1; t <= config.t_max; ++t) {
    const double frac = config.t_max == 1 ? 0.0 : static_cast<double>(t - 1) / (config.t_max - 1);
    product *= 1.0 - (kBetaStart + (kBetaEnd - kBetaStart) * frac);
    table[static_cast<std::size_t>(t)] = product;
  }
  return table;
}

}  // namespace

SyntheticScorer::SyntheticScorer(LabelTree tree, SyntheticScorerConfig config)
    : tree_(std::move(tree)), config_(config) {
  if (!(config_.base_error >= 0.0)) throw InvalidArgument("base_error must be >= 0");
  if (!(config_.distance_gain > 0.0)) throw InvalidArgument("distance_gain must be > 0");
  if (!(config_.noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma must be >= 0");
  if (config_.t_max < 1) throw InvalidArgument("t_max must be >= 1");
  if (config_.schedule == AlphaBarSchedule::kConstant &&
      !(config_.constant_alpha_bar > 0.0 && config_.constant_alpha_bar <= 1.0)) {
    throw InvalidArgument("constant_alpha_bar must be in (0, 1]");
  }
  alpha_bar_ = make_alpha_bar(config_);

  // Bottom-up: reverse preorder visits children before parents.
  min_leaf_depth_.assign(tree_.size(), std::numeric_limits<int>::max());
  const std::vector<NodeId> order = tree_.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId id = *it;
    if (tree_.is_leaf(id)) min_leaf_depth_[id.index()] = tree_.node_depth(id);
    if (const auto parent = tree_.parent(id)) {
      int& slot = min_leaf_depth_[parent->index()];
      slot = std::min(slot, min_leaf_depth_[id.index()]);
    }
  }
  for (const LabelNode& n : tree_.nodes()) by_label_[n.label].push_back(n.id);
}

double SyntheticScorer::alpha_bar(int t) const {
  if (t < 1 || t > config_.t_max) {
    throw InvalidArgument("timestep " + std::to_string(t) + " outside [1, " +
                          std::to_string(config_.t_max) + "]");
  }
  return alpha_bar_[static_cast<std::size_t>(t)];
}

NodeId SyntheticScorer::true_leaf(const ImageRef& image) const {
  if (!image.true_class) {
    throw InvalidArgument("synthetic scoring needs a true class for image '" + image.image_id + "'");
  }
  const auto leaf = tree_.find_leaf(*image.true_class);
  if (!leaf) throw LookupError("true class '" + *image.true_class + "' is not a leaf of the tree");
  return *leaf;
}

int SyntheticScorer::min_distance(NodeId truth, NodeId node) const {
  if (tree_.is_ancestor_or_self(node, truth)) return 0;
  // Outside the truth's ancestry every descendant leaf of `node` meets the
  // truth at the same common ancestor, so the nearest one is the shallowest.
  const NodeId lca = tree_.lowest_common_ancestor(truth, node);
  return tree_.node_depth(truth) + min_leaf_depth_[node.index()] - 2 * tree_.node_depth(lca);
}

double SyntheticScorer::mean_error(const ImageRef& image, NodeId node) const {
  tree_.node(node);
  return config_.base_error + config_.distance_gain * min_distance(true_leaf(image), node);
}

double SyntheticScorer::mean_error(const ImageRef& image, std::string_view label) const {
  const NodeId truth = true_leaf(image);
  const auto it = by_label_.find(std::string(label));
  int distance = tree_.node_depth(truth) + 1;
  if (it != by_label_.end()) {
    distance = std::numeric_limits<int>::max();
    for (NodeId n : it->second) distance = std::min(distance, min_distance(truth, n));
  }
  return config_.base_error + config_.distance_gain * distance;
}

double SyntheticScorer::score(const ScoreRequest& request) const {
  const double mean = mean_error(request.image, request.prompt.label);
  const double ab = alpha_bar(request.sample.t);
  if (config_.noise_sigma == 0.0) return mean;
  const std::uint64_t h =
      hash_values(config_.seed, fnv1a64(request.image.image_id), fnv1a64(request.prompt.label),
                  static_cast<std::uint64_t>(request.sample.t), request.sample.noise_id);
  const double noisy = mean + config_.noise_sigma * std::sqrt(1.0 - ab) * standard_normal(h);
  return std::max(0.0, noisy);
}

}  // namespace hdc
