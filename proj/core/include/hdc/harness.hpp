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

#ifndef HDC_HARNESS_HPP_
#define HDC_HARNESS_HPP_

// Experiment plumbing shared by the CLI, the acceptance suite and the
// benchmarks: datasets, scorer construction, parallel evaluation and report
// files.
//
// Experiment config (JSON; relative paths resolve against the config file):
//   {
//     "tree": "imagenet_like.json",          // required
//     "max_depth": 7,                          // optional limit_depth
//     "dataset": {"kind": "synthetic", "per_class": 1, "seed": 7}
//              | {"kind": "file", "path": "images.json"},
//     "scorer": {"kind": "synthetic", "base_error": 0.1, "distance_gain": 0.05,
//                "noise_sigma": 0.0, "schedule": "linear" | "constant",
//                "constant_alpha_bar": 0.5, "seed": 0}
//             | {"kind": "replay", "matrix": "errors.csv"}
//             | {"kind": "remote", "endpoint": "tcp://host:port"},
//     "method": "flat" | "hdc",
//     "flat": {"m_final": 16, "sample_seed": 0, "prompt_template": "...", "t_max": 1000},
//     "hdc": {"m_prune": 4, "m_final": 16, "start_level": 3, "sample_seed": 0,
//             "prompt_template": "...", "t_max": 1000,
//             "strategy": {"kind": "fixed-topk", "default_ratio": 0.5,
//                          "ratios": {"3": 0.5}, "sigma_multiplier": 2.0}},
//     "output_dir": "out",
//     "workers": 0,                            // 0 = hardware concurrency
//     "traces": true,
//     "record_matrix": false,
//     "confusion_subtrees": ["animal"]
//   }
// The HDC_SCORER_ENDPOINT environment variable overrides a remote endpoint.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hdc/classifier_flat.hpp"
#include "hdc/classifier_hdc.hpp"
#include "hdc/label_tree.hpp"
#include "hdc/metrics.hpp"
#include "hdc/remote_scorer.hpp"
#include "hdc/scoring.hpp"
#include "hdc/synthetic_scorer.hpp"

namespace hdc {

struct Dataset {
  std::uint64_t seed = 0;
  std::vector<ImageRef> images;

  // FNV-1a over image ids and true classes, as 16 hex digits.
  std::string hash() const;
};

// per_class images of every class, shuffled by seed, ids "img-<seed>-<i>".
Dataset generate_synthetic_dataset(const LabelTree& tree, int per_class, std::uint64_t seed);

// {"seed": s, "images": [{"image_id": "...", "true_class": "..."}]}
Dataset load_dataset(std::istream& in);
Dataset load_dataset_file(const std::filesystem::path& path);
void save_dataset(std::ostream& out, const Dataset& dataset);
void save_dataset_file(const std::filesystem::path& path, const Dataset& dataset);

// Throws ConfigError if an image has no true class or one that is not a leaf.
void check_dataset(const Dataset& dataset, const LabelTree& tree);

enum class Method { kFlat, kHdc };

struct ScorerSpec {
  enum class Kind { kSynthetic, kReplay, kRemote };

  Kind kind = Kind::kSynthetic;
  SyntheticScorerConfig synthetic;
  std::filesystem::path matrix;
  std::string endpoint;
};

struct DatasetSpec {
  enum class Kind { kSynthetic, kFile };

  Kind kind = Kind::kSynthetic;
  int per_class = 1;
  std::uint64_t seed = 0;
  std::filesystem::path path;
};

struct ExperimentConfig {
  std::filesystem::path tree;
  std::optional<int> max_depth;
  DatasetSpec dataset;
  ScorerSpec scorer;
  Method method = Method::kHdc;
  FlatConfig flat;
  HdcConfig hdc;
  std::filesystem::path output_dir = "out";
  int workers = 0;
  bool traces = true;
  bool record_matrix = false;
  std::vector<std::string> confusion_subtrees;

  int m_final() const { return method == Method::kFlat ? flat.m_final : hdc.m_final; }
  int t_max() const { return method == Method::kFlat ? flat.t_max : hdc.t_max; }
  // Throws ConfigError.
  void validate() const;
};

// Throws ConfigError for schema violations or missing files.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

// Builds the scorer a spec describes. Synthetic scorers use `tree` as their
// ground truth and `t_max` for their schedule.
std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec, const LabelTree& tree, int t_max);

struct ImageOutcome {
  EvaluatedImage evaluated;
  std::optional<PruneTrace> trace;
};

struct EvalOptions {
  Method method = Method::kHdc;
  FlatConfig flat;
  HdcConfig hdc;
  int workers = 0;
};

// Classifies every image on a bounded worker pool. Results come back in
// image order whatever the completion order. The first failing image (in
// image order) aborts the run and its exception is rethrown.
std::vector<ImageOutcome> evaluate_dataset(const LabelTree& tree, const Dataset& dataset,
                                           const Scorer& scorer, const EvalOptions& options);

struct ExperimentResult {
  EvalReport report;
  std::vector<ImageOutcome> outcomes;
  std::vector<std::filesystem::path> written;
  std::vector<std::string> warnings;
};

// Loads everything, evaluates, and writes report.json, report.csv,
// confusion.csv, per_class.csv, traces/<image>.json (hdc), one
// confusion_<synset>.csv per requested subtree and matrix.csv if recording.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct ComparisonRow {
  std::string metric;
  double baseline = 0.0;
  double method = 0.0;
  double delta = 0.0;
};

struct Comparison {
  std::string dataset_hash;
  std::string baseline_method;
  std::string method;
  std::vector<ComparisonRow> rows;
  double speedup = 0.0;  // from mean calls per image
};

// Throws InvalidArgument if the reports come from different datasets.
Comparison compare_reports(const EvalReport& baseline, const EvalReport& method);
void print_comparison(std::ostream& out, const Comparison& comparison);
nlohmann::ordered_json comparison_to_json(const Comparison& comparison);

EvalReport load_report_file(const std::filesystem::path& path);

}  // namespace hdc

#endif  // HDC_HARNESS_HPP_
