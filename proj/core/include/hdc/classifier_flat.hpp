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

#ifndef HDC_CLASSIFIER_FLAT_HPP_
#define HDC_CLASSIFIER_FLAT_HPP_

// The flat diffusion classifier: every class is scored on one fixed sample
// set and the class with the lowest mean error wins.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdc/estimator.hpp"
#include "hdc/label_tree.hpp"
#include "hdc/metrics.hpp"
#include "hdc/scoring.hpp"

namespace hdc {

struct FlatConfig {
  int m_final = 16;
  std::uint64_t sample_seed = 0;
  std::string prompt_template{kDefaultPromptTemplate};
  int t_max = kDefaultTMax;

  // Throws ConfigError.
  void validate() const;
};

struct ClassificationResult {
  std::string predicted;
  Posterior posterior;
  std::vector<RankedLabel> ranking;
  RunMetrics metrics;

  std::vector<std::string> ranked_labels() const;
};

// Scores each of `leaves` on every point of `samples` and ranks them. Fills
// eps_calls_final and surviving_leaves; the prune counters stay zero.
ClassificationResult classify_among(const LabelTree& tree, std::span<const NodeId> leaves,
                                    const ImageRef& image, const Scorer& scorer,
                                    const SampleSet& samples, std::string_view prompt_template);

ClassificationResult classify_flat(const LabelTree& tree, const ImageRef& image,
                                   const Scorer& scorer, const FlatConfig& config);

}  // namespace hdc

#endif  // HDC_CLASSIFIER_FLAT_HPP_
