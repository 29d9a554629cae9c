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

#ifndef HDC_METRICS_HPP_
#define HDC_METRICS_HPP_

// Cost accounting and accuracy reporting. The cost unit is the number of
// eps-prediction calls; wall-clock time is recorded for information only.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hdc/label_tree.hpp"

namespace hdc {

struct RunMetrics {
  std::size_t eps_calls_prune = 0;
  std::size_t eps_calls_final = 0;
  std::size_t eps_calls_total = 0;
  std::size_t surviving_leaves = 0;
  std::optional<double> wall_clock_seconds;
};

// 100 * (1 - method_cost / baseline_cost). Throws InvalidArgument if the
// baseline cost is not positive.
double speedup(double baseline_cost, double method_cost);

// True iff `truth` is among the first k labels of an ascending-error ranking.
bool top_k_hit(std::span<const std::string> ranking, std::string_view truth, int k);

struct Prediction {
  std::string truth;
  std::string predicted;
};

// Mean over classes of per-class top-1 accuracy, in percent.
double classwise_top1(std::span<const Prediction> results);

// Confusion restricted to the classes under one synset. Predictions outside
// the subtree are pooled into a single "other" column.
struct SubtreeConfusion {
  NodeId synset;
  std::vector<std::string> labels;                // rows and columns, preorder
  std::vector<std::vector<std::size_t>> counts;   // [truth][predicted]
  std::vector<std::size_t> other;                 // [truth]

  std::size_t total() const;
  void write_csv(std::ostream& out) const;
};

// Throws InvalidArgument if `synset` is a leaf.
SubtreeConfusion confusion_subtree(std::span<const Prediction> results, const LabelTree& tree,
                                   NodeId synset);

// One classified image, as consumed by the report builder.
struct EvaluatedImage {
  std::string image_id;
  std::string truth;
  std::vector<std::string> ranking;  // ascending final-stage error
  RunMetrics metrics;

  const std::string& predicted() const { return ranking.front(); }
};

struct ClassSummary {
  std::string label;
  std::size_t images = 0;
  std::size_t correct = 0;
  double mean_calls = 0.0;
};

struct EvalReport {
  std::string method;
  std::string dataset_hash;
  std::size_t images = 0;
  std::size_t classes = 0;
  std::map<int, double> top_k_overall;  // k in {1, 3, 5} -> percent
  double top1_classwise = 0.0;
  double mean_calls_per_image = 0.0;
  double mean_calls_prune = 0.0;
  double mean_calls_final = 0.0;
  double mean_surviving_leaves = 0.0;
  double baseline_calls_per_image = 0.0;  // N_C * M of the flat classifier
  double speedup_vs_baseline = 0.0;
  std::map<std::pair<std::string, std::string>, std::size_t> confusion;  // (truth, predicted)
  std::vector<ClassSummary> per_class;
  std::optional<double> wall_clock_seconds;
};

EvalReport build_report(std::string method, std::string dataset_hash,
                        std::span<const EvaluatedImage> images, std::size_t classes,
                        double baseline_calls_per_image);

// Wall-clock time goes under a separate "timing" key.
nlohmann::ordered_json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& doc);
void write_report_csv(std::ostream& out, const EvalReport& report);
void write_confusion_csv(std::ostream& out, const EvalReport& report);
void write_per_class_csv(std::ostream& out, const EvalReport& report);

}  // namespace hdc

#endif  // HDC_METRICS_HPP_
