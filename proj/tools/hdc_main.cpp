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

// Command-line front end: tree maintenance, experiment runs, report
// comparison and synthetic dataset generation.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hdc/classifier_hdc.hpp"
#include "hdc/error.hpp"
#include "hdc/harness.hpp"
#include "hdc/label_tree.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

void print_stats(const hdc::LabelTree& tree) {
  const hdc::TreeStats s = hdc::tree_stats(tree);
  std::cout << "depth=" << s.depth << " leaves=" << s.leaves << " nodes=" << s.nodes
            << " internal=" << s.internal << '\n';
  std::cout << "branching (children: synsets)\n";
  for (const auto& [fanout, count] : s.branching) {
    std::cout << "  " << fanout << ": " << count << '\n';
  }
  std::cout << "leaves per depth\n";
  for (const auto& [depth, count] : s.leaves_per_depth) {
    std::cout << "  " << depth << ": " << count << '\n';
  }
}

struct TreeArgs {
  std::string in;
  std::string out;
  int max_depth = 0;
  std::string label;
  bool greedy = false;
  std::string scorer_config;
  int probe_images = 4;
  int samples = 4;
  std::uint64_t seed = 0;
};

struct RunArgs {
  std::string config;
  std::optional<std::string> method;
  std::optional<std::string> output_dir;
  std::optional<int> workers;
  std::optional<int> max_depth;
  std::optional<int> m_final;
  std::optional<int> m_prune;
  std::optional<int> start_level;
  std::optional<std::string> strategy;
  std::optional<double> ratio;
  std::optional<double> sigma;
  std::optional<std::uint64_t> sample_seed;
  std::optional<std::string> prompt_template;
  std::optional<std::string> endpoint;
};

void apply_overrides(hdc::ExperimentConfig& c, const RunArgs& a) {
  if (a.method) c.method = hdc::parse_method(*a.method);
  if (a.output_dir) c.output_dir = *a.output_dir;
  if (a.workers) c.workers = *a.workers;
  if (a.max_depth) c.max_depth = *a.max_depth;
  if (a.m_final) c.flat.m_final = c.hdc.m_final = *a.m_final;
  if (a.m_prune) c.hdc.m_prune = *a.m_prune;
  if (a.start_level) c.hdc.start_level = *a.start_level;
  if (a.strategy) c.hdc.strategy.kind = hdc::parse_prune_kind(*a.strategy);
  if (a.ratio) {
    c.hdc.strategy.default_ratio = *a.ratio;
    c.hdc.strategy.ratios.clear();
  }
  if (a.sigma) c.hdc.strategy.sigma_multiplier = *a.sigma;
  if (a.sample_seed) c.flat.sample_seed = c.hdc.sample_seed = *a.sample_seed;
  if (a.prompt_template) c.flat.prompt_template = c.hdc.prompt_template = *a.prompt_template;
  if (a.endpoint) {
    c.scorer.kind = hdc::ScorerSpec::Kind::kRemote;
    c.scorer.endpoint = *a.endpoint;
  }
}

int run(const RunArgs& args) {
  hdc::ExperimentConfig config = hdc::load_experiment_config(args.config);
  apply_overrides(config, args);
  config.validate();
  const hdc::ExperimentResult result = hdc::run_experiment(config);
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << '\n';
  const hdc::EvalReport& r = result.report;
  std::printf("method=%s images=%zu classes=%zu top1=%.2f top3=%.2f top5=%.2f "
              "top1_classwise=%.2f\n",
              r.method.c_str(), r.images, r.classes, r.top_k_overall.at(1),
              r.top_k_overall.at(3), r.top_k_overall.at(5), r.top1_classwise);
  std::printf("mean_calls_per_image=%.2f baseline_calls_per_image=%.2f speedup=%.2f%%\n",
              r.mean_calls_per_image, r.baseline_calls_per_image, r.speedup_vs_baseline);
  std::cout << "wrote " << result.written.size() << " files to " << config.output_dir.string()
            << '\n';
  return 0;
}

int tree_insert(const TreeArgs& a) {
  const hdc::LabelTree tree = hdc::load_tree_file(a.in);
  if (!a.greedy) {
    hdc::save_tree_file(a.out, hdc::insert_class(tree, a.label, hdc::InsertMode::kUnderRoot));
    return 0;
  }
  if (a.scorer_config.empty()) {
    throw hdc::ConfigError("--greedy needs --scorer-config");
  }
  // The config's tree is the scorer's ground truth and must know the label.
  const hdc::ExperimentConfig config = hdc::load_experiment_config(a.scorer_config);
  const hdc::LabelTree truth = hdc::load_tree_file(config.tree);
  const auto scorer = hdc::make_scorer(config.scorer, truth, config.t_max());
  hdc::GreedyProbe probe;
  probe.scorer = scorer.get();
  for (int i = 0; i < a.probe_images; ++i) {
    probe.images.push_back({"probe-" + a.label + "-" + std::to_string(i), a.label, std::nullopt});
  }
  probe.samples_per_node = a.samples;
  probe.seed = a.seed;
  probe.t_max = config.t_max();
  probe.prompt_template = config.method == hdc::Method::kFlat ? config.flat.prompt_template
                                                             : config.hdc.prompt_template;
  const hdc::LabelTree out = hdc::insert_class(tree, a.label, hdc::InsertMode::kGreedy, probe);
  const hdc::NodeId leaf = *out.find_leaf(a.label);
  std::cout << "inserted '" << a.label << "' under '" << out.label(*out.parent(leaf)) << "'\n";
  hdc::save_tree_file(a.out, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical diffusion classifier engine"};
  app.require_subcommand(1);

  TreeArgs tree_args;
  auto* tree_cmd = app.add_subcommand("tree", "Validate, inspect and transform label trees");
  tree_cmd->require_subcommand(1);
  auto* validate = tree_cmd->add_subcommand("validate", "Check a tree file");
  validate->add_option("tree", tree_args.in, "Tree file")->required()->check(CLI::ExistingFile);
  auto* stats = tree_cmd->add_subcommand("stats", "Print depth, counts and fan-out histogram");
  stats->add_option("tree", tree_args.in, "Tree file")->required()->check(CLI::ExistingFile);
  auto* limit = tree_cmd->add_subcommand("limit-depth", "Flatten a tree to a maximum depth");
  limit->add_option("--max", tree_args.max_depth, "Maximum leaf depth")
      ->required()
      ->check(CLI::PositiveNumber);
  limit->add_option("in", tree_args.in, "Input tree")->required()->check(CLI::ExistingFile);
  limit->add_option("out", tree_args.out, "Output tree")->required();
  auto* insert = tree_cmd->add_subcommand("insert", "Add a class");
  insert->add_option("--label", tree_args.label, "New class label")->required();
  insert->add_flag("--greedy", tree_args.greedy, "Place the class by greedy descent");
  insert->add_option("--scorer-config", tree_args.scorer_config,
                     "Experiment config whose scorer probes the placement");
  insert->add_option("--probe", tree_args.probe_images, "Probe images")
      ->check(CLI::PositiveNumber);
  insert->add_option("--samples", tree_args.samples, "Samples per candidate synset")
      ->check(CLI::PositiveNumber);
  insert->add_option("--seed", tree_args.seed, "Probe sample seed");
  insert->add_option("in", tree_args.in, "Input tree")->required()->check(CLI::ExistingFile);
  insert->add_option("out", tree_args.out, "Output tree")->required();
  auto* remove = tree_cmd->add_subcommand("remove", "Remove a class");
  remove->add_option("--label", tree_args.label, "Class label")->required();
  remove->add_option("in", tree_args.in, "Input tree")->required()->check(CLI::ExistingFile);
  remove->add_option("out", tree_args.out, "Output tree")->required();

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
  run_cmd->add_option("--config", run_args.config, "Experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--method", run_args.method, "flat or hdc");
  run_cmd->add_option("--output-dir", run_args.output_dir, "Report directory");
  run_cmd->add_option("--workers", run_args.workers, "Worker threads (0 = all cores)");
  run_cmd->add_option("--max-depth", run_args.max_depth, "Limit tree depth");
  run_cmd->add_option("--m-final", run_args.m_final, "Final-stage samples");
  run_cmd->add_option("--m-prune", run_args.m_prune, "Pruning-stage samples");
  run_cmd->add_option("--start-level", run_args.start_level, "Traversal start level");
  run_cmd->add_option("--strategy", run_args.strategy, "fixed-topk or dynamic-sigma");
  run_cmd->add_option("--ratio", run_args.ratio, "Uniform K_d for fixed-topk");
  run_cmd->add_option("--sigma", run_args.sigma, "Multiplier for dynamic-sigma");
  run_cmd->add_option("--sample-seed", run_args.sample_seed, "Sample set seed");
  run_cmd->add_option("--prompt-template", run_args.prompt_template, "Prompt with {label}");
  run_cmd->add_option("--endpoint", run_args.endpoint, "Use a remote scorer at this endpoint");

  std::string baseline_path, method_path, compare_out;
  auto* compare = app.add_subcommand("compare", "Compare a baseline report with another run");
  compare->add_option("baseline", baseline_path, "Baseline report.json")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("method", method_path, "Method report.json")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("-o,--output", compare_out, "Write the comparison as JSON");

  std::string gen_tree, gen_out;
  int per_class = 1;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic dataset");
  gen->add_option("--tree", gen_tree, "Tree file")->required()->check(CLI::ExistingFile);
  gen->add_option("--per-class", per_class, "Images per class")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Dataset seed");
  gen->add_option("-o,--output", gen_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (validate->parsed()) {
      const hdc::LabelTree tree = hdc::load_tree_file(tree_args.in);
      std::cout << "ok: depth=" << tree.depth() << " leaves=" << tree.leaf_count()
                << " nodes=" << tree.size() << '\n';
    } else if (stats->parsed()) {
      print_stats(hdc::load_tree_file(tree_args.in));
    } else if (limit->parsed()) {
      const hdc::LabelTree out =
          hdc::limit_depth(hdc::load_tree_file(tree_args.in), tree_args.max_depth);
      hdc::save_tree_file(tree_args.out, out);
      std::cout << "depth=" << out.depth() << " leaves=" << out.leaf_count() << '\n';
    } else if (insert->parsed()) {
      return tree_insert(tree_args);
    } else if (remove->parsed()) {
      const hdc::LabelTree out =
          hdc::remove_class(hdc::load_tree_file(tree_args.in), tree_args.label);
      hdc::save_tree_file(tree_args.out, out);
      std::cout << "leaves=" << out.leaf_count() << '\n';
    } else if (run_cmd->parsed()) {
      return run(run_args);
    } else if (compare->parsed()) {
      const hdc::Comparison c = hdc::compare_reports(hdc::load_report_file(baseline_path),
                                                     hdc::load_report_file(method_path));
      hdc::print_comparison(std::cout, c);
      if (!compare_out.empty()) {
        std::ofstream out(compare_out);
        if (!out) throw hdc::IoError("cannot write '" + compare_out + "'");
        out << hdc::comparison_to_json(c).dump(2) << '\n';
      }
    } else if (gen->parsed()) {
      const hdc::Dataset d =
          hdc::generate_synthetic_dataset(hdc::load_tree_file(gen_tree), per_class, gen_seed);
      if (gen_out.empty()) {
        hdc::save_dataset(std::cout, d);
      } else {
        hdc::save_dataset_file(gen_out, d);
        std::cerr << d.images.size() << " images, hash " << d.hash() << '\n';
      }
    }
  } catch (const hdc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const hdc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
