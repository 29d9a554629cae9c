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

#ifndef HDC_CLASSIFIER_HDC_HPP_
#define HDC_CLASSIFIER_HDC_HPP_

// Hierarchical classification: a cheap level-by-level pruning stage over the
// label tree, then the flat procedure on the surviving classes.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hdc/classifier_flat.hpp"
#include "hdc/estimator.hpp"
#include "hdc/label_tree.hpp"
#include "hdc/scoring.hpp"

namespace hdc {

enum class PruneKind {
  kFixedTopK,     // keep the ceil(K_d * n) best candidates
  kDynamicSigma,  // keep candidates within sigma_multiplier std devs of the best
};

struct PruneStrategy {
  PruneKind kind = PruneKind::kFixedTopK;
  double default_ratio = 0.5;
  std::map<int, double> ratios;  // candidate depth (edges from root) -> K_d
  double sigma_multiplier = 2.0;

  double ratio_for(int depth) const;
  // Throws ConfigError.
  void validate() const;
};

std::string_view to_string(PruneKind kind);
// "fixed-topk" or "dynamic-sigma"; throws ConfigError otherwise.
PruneKind parse_prune_kind(std::string_view text);

struct HdcConfig {
  int m_prune = 0;  // 0 selects max(1, m_final / 4)
  int m_final = 16;
  int start_level = 1;
  PruneStrategy strategy;
  std::uint64_t sample_seed = 0;
  std::string prompt_template{kDefaultPromptTemplate};
  int t_max = kDefaultTMax;

  int effective_m_prune() const;
  // Throws ConfigError on invalid values and returns non-fatal warnings.
  std::vector<std::string> validate() const;
};

struct FrontierState {
  int depth = 0;
  std::vector<NodeId> selected;
  std::map<NodeId, NodeErrorAccumulator> accumulators;
};

struct FrontierEvaluation {
  std::map<NodeId, double> means;
  std::vector<NodeId> memoized;  // candidates that cost nothing this depth
  std::size_t calls = 0;
};

// Scores the pooled effective children of frontier.selected on `samples`.
// Finalized candidates keep their earlier mean; the rest are scored once per
// sample point and finalized. Candidates sharing a label share their scores.
FrontierEvaluation evaluate_frontier(const LabelTree& tree, const ImageRef& image,
                                     const Scorer& scorer, FrontierState& frontier,
                                     const SampleSet& samples, std::string_view prompt_template);

// Survivors in ascending (mean, NodeId) order. Never empty.
std::vector<NodeId> prune(const std::map<NodeId, double>& candidates,
                          const PruneStrategy& strategy, int depth);

struct CandidateRecord {
  NodeId node;
  std::string label;
  double mean_error = 0.0;
  std::size_t samples = 0;
  bool memoized = false;
};

struct DepthRecord {
  int depth = 0;
  std::vector<CandidateRecord> candidates;  // NodeId order
  std::vector<NodeId> kept;
  std::size_t calls = 0;
};

struct PruneTrace {
  std::string image_id;
  int start_level = 1;
  std::vector<NodeId> initial;
  std::vector<DepthRecord> depths;
  std::vector<NodeId> surviving;
};

nlohmann::ordered_json trace_to_json(const PruneTrace& trace, const LabelTree& tree);

struct HdcResult {
  ClassificationResult classification;
  PruneTrace trace;
};

HdcResult classify_hdc(const LabelTree& tree, const ImageRef& image, const Scorer& scorer,
                       const HdcConfig& config);

// The flat configuration whose final stage an HDC run shares.
FlatConfig flat_equivalent(const HdcConfig& config);

}  // namespace hdc

#endif  // HDC_CLASSIFIER_HDC_HPP_
