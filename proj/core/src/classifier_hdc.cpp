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

#include "hdc/classifier_hdc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "hdc/error.hpp"

namespace hdc {

double PruneStrategy::ratio_for(int depth) const {
  const auto it = ratios.find(depth);
  return it == ratios.end() ? default_ratio : it->second;
}

void PruneStrategy::validate() const {
  auto check_ratio = [](double r, const std::string& what) {
    if (!(r > 0.0 && r <= 1.0)) {
      throw ConfigError(what + " must be in (0, 1], got " + std::to_string(r));
    }
  };
  switch (kind) {
    case PruneKind::kFixedTopK:
      check_ratio(default_ratio, "default_ratio");
      for (const auto& [d, r] : ratios) check_ratio(r, "ratio for depth " + std::to_string(d));
      break;
    case PruneKind::kDynamicSigma:
      if (!(sigma_multiplier > 0.0) || !std::isfinite(sigma_multiplier)) {
        throw ConfigError("sigma_multiplier must be positive");
      }
      break;
  }
}

std::string_view to_string(PruneKind kind) {
  return kind == PruneKind::kFixedTopK ? "fixed-topk" : "dynamic-sigma";
}

PruneKind parse_prune_kind(std::string_view text) {
  if (text == "fixed-topk") return PruneKind::kFixedTopK;
  if (text == "dynamic-sigma") return PruneKind::kDynamicSigma;
  throw ConfigError("unknown strategy '" + std::string(text) +
                    "' (expected fixed-topk or dynamic-sigma)");
}

int HdcConfig::effective_m_prune() const {
  return m_prune > 0 ? m_prune : std::max(1, m_final / 4);
}

std::vector<std::string> HdcConfig::validate() const {
  if (m_prune < 0) throw ConfigError("m_prune must be >= 1 (or 0 for the default)");
  if (m_final < 1) throw ConfigError("m_final must be >= 1");
  if (start_level < 1) throw ConfigError("start_level must be >= 1");
  if (t_max < 1) throw ConfigError("t_max must be >= 1");
  strategy.validate();
  render_prompt(prompt_template, "x");
  std::vector<std::string> warnings;
  if (effective_m_prune() > m_final) {
    warnings.push_back("m_prune (" + std::to_string(effective_m_prune()) + ") exceeds m_final (" +
                       std::to_string(m_final) + ")");
  }
  return warnings;
}

FlatConfig flat_equivalent(const HdcConfig& config) {
  return {config.m_final, config.sample_seed, config.prompt_template, config.t_max};
}

FrontierEvaluation evaluate_frontier(const LabelTree& tree, const ImageRef& image,
                                     const Scorer& scorer, FrontierState& frontier,
                                     const SampleSet& samples, std::string_view prompt_template) {
  if (frontier.selected.empty()) throw InvalidArgument("empty frontier");
  if (samples.samples.empty()) throw InvalidArgument("empty sample set");

  std::set<NodeId> pool;
  for (NodeId n : frontier.selected) {
    for (NodeId c : effective_children(tree, n)) pool.insert(c);
  }

  FrontierEvaluation out;
  std::unordered_map<std::string, std::vector<double>> scored;  // label -> errors, this depth
  for (NodeId c : pool) {
    auto [it, inserted] = frontier.accumulators.try_emplace(c, c);
    NodeErrorAccumulator& acc = it->second;
    if (acc.finalized()) {
      out.memoized.push_back(c);
    } else {
      const std::string& label = tree.label(c);
      auto hit = scored.find(label);
      if (hit == scored.end()) {
        const Prompt prompt = render_prompt(prompt_template, label);
        std::vector<double> errors;
        errors.reserve(samples.size());
        for (const SamplePoint& s : samples.samples) {
          errors.push_back(score_checked(scorer, {image, prompt, s}));
        }
        out.calls += errors.size();
        hit = scored.emplace(label, std::move(errors)).first;
      }
      for (double e : hit->second) acc.append(e);
      acc.finalize();
    }
    out.means.emplace(c, mc_mean(acc));
  }
  return out;
}

std::vector<NodeId> prune(const std::map<NodeId, double>& candidates,
                          const PruneStrategy& strategy, int depth) {
  if (candidates.empty()) throw InvalidArgument("no candidates to prune");
  std::vector<std::pair<double, NodeId>> order;
  order.reserve(candidates.size());
  for (const auto& [id, mean] : candidates) order.emplace_back(mean, id);
  std::sort(order.begin(), order.end());

  std::size_t keep = 0;
  if (strategy.kind == PruneKind::kFixedTopK) {
    const double k = strategy.ratio_for(depth) * static_cast<double>(order.size());
    keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(k - 1e-9)));
    keep = std::min(keep, order.size());
  } else {
    double sum = 0.0;
    for (const auto& [mean, id] : order) sum += mean;
    const double mu = sum / static_cast<double>(order.size());
    double sq = 0.0;
    for (const auto& [mean, id] : order) sq += (mean - mu) * (mean - mu);
    const double sigma = std::sqrt(sq / static_cast<double>(order.size()));
    const double threshold = order.front().first + strategy.sigma_multiplier * sigma;
    while (keep < order.size() && order[keep].first <= threshold) ++keep;
    keep = std::max<std::size_t>(keep, 1);
  }

  std::vector<NodeId> kept;
  kept.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) kept.push_back(order[i].second);
  return kept;
}

nlohmann::ordered_json trace_to_json(const PruneTrace& trace, const LabelTree& tree) {
  auto labels = [&tree](const std::vector<NodeId>& ids) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (NodeId id : ids) arr.push_back(tree.label(id));
    return arr;
  };
  auto ids = [](const std::vector<NodeId>& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (NodeId id : v) arr.push_back(id.value);
    return arr;
  };
  nlohmann::ordered_json depths = nlohmann::ordered_json::array();
  for (const DepthRecord& d : trace.depths) {
    nlohmann::ordered_json cands = nlohmann::ordered_json::array();
    for (const CandidateRecord& c : d.candidates) {
      cands.push_back({{"id", c.node.value},
                       {"label", c.label},
                       {"mean_error", c.mean_error},
                       {"samples", c.samples},
                       {"memoized", c.memoized}});
    }
    depths.push_back({{"depth", d.depth},
                      {"calls", d.calls},
                      {"candidates", cands},
                      {"kept", ids(d.kept)},
                      {"kept_labels", labels(d.kept)}});
  }
  return {{"image_id", trace.image_id},
          {"start_level", trace.start_level},
          {"initial", ids(trace.initial)},
          {"depths", depths},
          {"surviving", labels(trace.surviving)}};
}

HdcResult classify_hdc(const LabelTree& tree, const ImageRef& image, const Scorer& scorer,
                       const HdcConfig& config) {
  config.validate();
  if (config.start_level > tree.depth()) {
    throw InvalidArgument("start_level " + std::to_string(config.start_level) +
                          " exceeds tree depth " + std::to_string(tree.depth()));
  }
  const auto start = std::chrono::steady_clock::now();
  const int m_prune = config.effective_m_prune();

  HdcResult out;
  PruneTrace& trace = out.trace;
  trace.image_id = image.image_id;
  trace.start_level = config.start_level;

  FrontierState frontier;
  frontier.selected = descend_to_level(tree, config.start_level);
  trace.initial = frontier.selected;

  std::size_t prune_calls = 0;
  for (int d = config.start_level; d <= tree.depth(); ++d) {
    frontier.depth = d;
    const SampleSet samples = build_sample_set(
        derive_seed(config.sample_seed, "prune", static_cast<std::uint64_t>(d)), m_prune,
        config.t_max);
    const FrontierEvaluation eval =
        evaluate_frontier(tree, image, scorer, frontier, samples, config.prompt_template);
    std::vector<NodeId> kept = prune(eval.means, config.strategy, d);

    DepthRecord record;
    record.depth = d;
    record.calls = eval.calls;
    for (const auto& [id, mean] : eval.means) {
      const bool memo = std::find(eval.memoized.begin(), eval.memoized.end(), id) !=
                        eval.memoized.end();
      record.candidates.push_back({id, tree.label(id), mean,
                                   frontier.accumulators.at(id).sample_errors().size(), memo});
    }
    record.kept = kept;
    trace.depths.push_back(std::move(record));

    prune_calls += eval.calls;
    frontier.selected = std::move(kept);
  }

  for (NodeId id : frontier.selected) {
    if (!tree.is_leaf(id)) throw std::logic_error("pruning ended on an internal node");
  }
  trace.surviving = frontier.selected;

  const SampleSet final_samples =
      build_sample_set(config.sample_seed, config.m_final, config.t_max);
  out.classification = classify_among(tree, frontier.selected, image, scorer, final_samples,
                                      config.prompt_template);
  RunMetrics& m = out.classification.metrics;
  m.eps_calls_prune = prune_calls;
  m.eps_calls_total = m.eps_calls_prune + m.eps_calls_final;
  m.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace hdc
