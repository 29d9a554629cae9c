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

#ifndef HDC_ESTIMATOR_HPP_
#define HDC_ESTIMATOR_HPP_

// Monte Carlo aggregation of per-sample errors, and the posteriors derived
// from them under a uniform class prior.

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdc/label_tree.hpp"

namespace hdc {

// Per-node error samples collected during traversal. Once finalized, the
// sample list is frozen and later visits reuse its mean.
class NodeErrorAccumulator {
 public:
  NodeErrorAccumulator() = default;
  explicit NodeErrorAccumulator(NodeId node) : node_(node) {}

  // Throws InvalidArgument after finalize().
  void append(double error);
  void finalize() { finalized_ = true; }

  NodeId node() const { return node_; }
  bool finalized() const { return finalized_; }
  bool empty() const { return errors_.empty(); }
  std::span<const double> sample_errors() const { return errors_; }

 private:
  NodeId node_;
  std::vector<double> errors_;
  bool finalized_ = false;
};

// Arithmetic mean; throws InvalidArgument on an empty list.
double mc_mean(std::span<const double> sample_errors);
double mc_mean(const NodeErrorAccumulator& acc);

struct Posterior {
  std::map<std::string, double> entries;

  double at(std::string_view label) const;
  // Highest probability; ties go to the lexicographically smallest label.
  std::string most_probable() const;
};

// p(c) = exp(-e_c) / sum_j exp(-e_j), evaluated with a max shift.
Posterior softmax_posterior(const std::map<std::string, double>& mean_errors);

// Paired-difference form: p(c_i) = 1 / sum_j exp(mean_s[d_i(s) - d_j(s)]).
// Differences are taken per sample against `anchor`. All lists must have the
// same length.
Posterior paired_posterior(const std::map<std::string, std::vector<double>>& sample_errors,
                           std::string_view anchor);

// Smallest mean error; ties go to the lexicographically smallest label.
std::string argmin_label(const std::map<std::string, double>& mean_errors);

struct RankedLabel {
  std::string label;
  double mean_error = 0.0;
};

// Ascending mean error, ties by label, so ranking.front() == argmin_label.
std::vector<RankedLabel> rank_by_error(const std::map<std::string, double>& mean_errors);

}  // namespace hdc

#endif  // HDC_ESTIMATOR_HPP_
