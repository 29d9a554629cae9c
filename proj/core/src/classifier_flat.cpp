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

#include "hdc/classifier_flat.hpp"

#include <chrono>

#include "hdc/error.hpp"

namespace hdc {

void FlatConfig::validate() const {
  if (m_final < 1) throw ConfigError("m_final must be >= 1");
  if (t_max < 1) throw ConfigError("t_max must be >= 1");
  render_prompt(prompt_template, "x");
}

std::vector<std::string> ClassificationResult::ranked_labels() const {
  std::vector<std::string> out;
  out.reserve(ranking.size());
  for (const RankedLabel& r : ranking) out.push_back(r.label);
  return out;
}

ClassificationResult classify_among(const LabelTree& tree, std::span<const NodeId> leaves,
                                    const ImageRef& image, const Scorer& scorer,
                                    const SampleSet& samples, std::string_view prompt_template) {
  if (leaves.empty()) throw InvalidArgument("no classes to score");
  if (samples.samples.empty()) throw InvalidArgument("empty sample set");

  std::map<std::string, std::vector<double>> errors;
  std::map<std::string, double> means;
  for (NodeId leaf : leaves) {
    if (!tree.is_leaf(leaf)) {
      throw InvalidArgument("node '" + tree.label(leaf) + "' is not a class");
    }
    const Prompt prompt = render_prompt(prompt_template, tree.label(leaf));
    std::vector<double>& row = errors[prompt.label];
    row.reserve(samples.size());
    for (const SamplePoint& s : samples.samples) {
      row.push_back(score_checked(scorer, {image, prompt, s}));
    }
    means[prompt.label] = mc_mean(row);
  }

  ClassificationResult result;
  result.ranking = rank_by_error(means);
  result.predicted = result.ranking.front().label;
  result.posterior = paired_posterior(errors, result.predicted);
  result.metrics.eps_calls_final = leaves.size() * samples.size();
  result.metrics.eps_calls_total = result.metrics.eps_calls_final;
  result.metrics.surviving_leaves = leaves.size();
  return result;
}

ClassificationResult classify_flat(const LabelTree& tree, const ImageRef& image,
                                   const Scorer& scorer, const FlatConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const SampleSet samples = build_sample_set(config.sample_seed, config.m_final, config.t_max);
  ClassificationResult result =
      classify_among(tree, tree.leaves(), image, scorer, samples, config.prompt_template);
  result.metrics.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace hdc
