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

#ifndef HDC_SYNTHETIC_SCORER_HPP_
#define HDC_SYNTHETIC_SCORER_HPP_

// A deterministic stand-in for a diffusion model. The noiseless error of a
// prompt is base_error + distance_gain * tree_distance(true class, node),
// where internal nodes take the minimum over their descendant leaves. Each
// draw adds Gaussian noise of scale noise_sigma * sqrt(1 - alpha_bar_t), drawn
// by hashing (seed, image, label, t, noise_id).

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hdc/label_tree.hpp"
#include "hdc/scoring.hpp"

namespace hdc {

enum class AlphaBarSchedule {
  // DDPM linear beta schedule, beta from 1e-4 to 0.02 over t_max steps.
  kLinear,
  // alpha_bar_t = constant_alpha_bar for every t.
  kConstant,
};

struct SyntheticScorerConfig {
  double base_error = 0.1;
  double distance_gain = 0.05;
  double noise_sigma = 0.0;
  AlphaBarSchedule schedule = AlphaBarSchedule::kLinear;
  double constant_alpha_bar = 0.5;
  int t_max = kDefaultTMax;
  std::uint64_t seed = 0;
};

class SyntheticScorer final : public Scorer {
 public:
  SyntheticScorer(LabelTree tree, SyntheticScorerConfig config);

  double score(const ScoreRequest& request) const override;

  // Noiseless error of `node`'s label for `image`; needs image.true_class.
  double mean_error(const ImageRef& image, NodeId node) const;
  // As above, resolved by label. Labels absent from the tree are treated as
  // a leaf hanging directly under the root.
  double mean_error(const ImageRef& image, std::string_view label) const;
  double alpha_bar(int t) const;

  const LabelTree& tree() const { return tree_; }
  const SyntheticScorerConfig& config() const { return config_; }

 private:
  NodeId true_leaf(const ImageRef& image) const;
  int min_distance(NodeId truth, NodeId node) const;

  LabelTree tree_;
  SyntheticScorerConfig config_;
  std::vector<int> min_leaf_depth_;
  std::unordered_map<std::string, std::vector<NodeId>> by_label_;
  std::vector<double> alpha_bar_;  // index t, 1..t_max
};

}  // namespace hdc

#endif  // HDC_SYNTHETIC_SCORER_HPP_
