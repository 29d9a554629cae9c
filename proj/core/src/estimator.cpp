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

#include "hdc/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "hdc/error.hpp"

namespace hdc {

namespace {

void require_finite(const std::map<std::string, double>& values) {
  if (values.empty()) throw InvalidArgument("no labels to compare");
  for (const auto& [label, v] : values) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite error for label '" + label + "'");
  }
}

}  // namespace

void NodeErrorAccumulator::append(double error) {
  if (finalized_) {
    throw InvalidArgument("accumulator for node " + std::to_string(node_.value) + " is finalized");
  }
  errors_.push_back(error);
}

double mc_mean(std::span<const double> sample_errors) {
  if (sample_errors.empty()) throw InvalidArgument("mean of an empty sample list");
  double sum = 0.0;
  for (double e : sample_errors) sum += e;
  return sum / static_cast<double>(sample_errors.size());
}

double mc_mean(const NodeErrorAccumulator& acc) { return mc_mean(acc.sample_errors()); }

double Posterior::at(std::string_view label) const {
  const auto it = entries.find(std::string(label));
  if (it == entries.end()) throw LookupError("label '" + std::string(label) + "' not in posterior");
  return it->second;
}

std::string Posterior::most_probable() const {
  if (entries.empty()) throw InvalidArgument("empty posterior");
  auto best = entries.begin();
  for (auto it = entries.begin(); it != entries.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

Posterior softmax_posterior(const std::map<std::string, double>& mean_errors) {
  require_finite(mean_errors);
  double lowest = mean_errors.begin()->second;
  for (const auto& [label, e] : mean_errors) lowest = std::min(lowest, e);
  Posterior p;
  double total = 0.0;
  for (const auto& [label, e] : mean_errors) {
    const double w = std::exp(lowest - e);
    p.entries.emplace(label, w);
    total += w;
  }
  for (auto& [label, w] : p.entries) w /= total;
  return p;
}

Posterior paired_posterior(const std::map<std::string, std::vector<double>>& sample_errors,
                           std::string_view anchor) {
  if (sample_errors.empty()) throw InvalidArgument("no labels to compare");
  const auto anchor_it = sample_errors.find(std::string(anchor));
  if (anchor_it == sample_errors.end()) {
    throw LookupError("anchor label '" + std::string(anchor) + "' not present");
  }
  const std::vector<double>& base = anchor_it->second;
  if (base.empty()) throw InvalidArgument("empty sample lists");

  // delta[c] = mean_s(d_c(s) - d_anchor(s)); mean_s(d_i - d_j) = delta_i - delta_j.
  std::map<std::string, double> delta;
  for (const auto& [label, errors] : sample_errors) {
    if (errors.size() != base.size()) {
      throw InvalidArgument("ragged sample lists: '" + label + "' has " +
                            std::to_string(errors.size()) + " samples, anchor has " +
                            std::to_string(base.size()));
    }
    double sum = 0.0;
    for (std::size_t s = 0; s < errors.size(); ++s) sum += errors[s] - base[s];
    delta.emplace(label, sum / static_cast<double>(errors.size()));
  }
  require_finite(delta);

  double lowest = delta.begin()->second;
  for (const auto& [label, d] : delta) lowest = std::min(lowest, d);
  // 1 / sum_j exp(delta_i - delta_j), with the sum factored around the minimum.
  double shifted_sum = 0.0;
  for (const auto& [label, d] : delta) shifted_sum += std::exp(lowest - d);
  Posterior p;
  for (const auto& [label, d] : delta) {
    p.entries.emplace(label, 1.0 / (std::exp(d - lowest) * shifted_sum));
  }
  return p;
}

std::string argmin_label(const std::map<std::string, double>& mean_errors) {
  require_finite(mean_errors);
  auto best = mean_errors.begin();
  for (auto it = mean_errors.begin(); it != mean_errors.end(); ++it) {
    if (it->second < best->second) best = it;
  }
  return best->first;
}

std::vector<RankedLabel> rank_by_error(const std::map<std::string, double>& mean_errors) {
  std::vector<RankedLabel> ranking;
  ranking.reserve(mean_errors.size());
  for (const auto& [label, e] : mean_errors) ranking.push_back({label, e});
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const RankedLabel& a, const RankedLabel& b) { return a.mean_error < b.mean_error; });
  return ranking;
}

}  // namespace hdc
