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

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hdc/error.hpp"
#include "hdc/harness.hpp"
#include "test_support.hpp"

namespace hdc {
namespace {

using testing::fixture;
using testing::scratch_dir;

nlohmann::json base_config(const std::string& tree, const std::string& method) {
  return {{"tree", fixture(tree).string()},
          {"dataset", {{"kind", "synthetic"}, {"per_class", 1}, {"seed", 3}}},
          {"scorer", {{"kind", "synthetic"}, {"noise_sigma", 0.3}, {"seed", 4}}},
          {"method", method},
          {"flat", {{"m_final", 8}}},
          {"hdc", {{"m_prune", 2}, {"m_final", 8}, {"start_level", 1}}},
          {"workers", 1}};
}

ExperimentConfig config_in(const nlohmann::json& doc, const std::string& dir) {
  ExperimentConfig c = parse_experiment_config(doc, fixture(""));
  c.output_dir = scratch_dir(dir);
  return c;
}

nlohmann::json without_timing(const std::filesystem::path& report) {
  nlohmann::json doc = nlohmann::json::parse(testing::read_file(report));
  doc.erase("timing");
  return doc;
}

TEST(Dataset, SyntheticGeneration) {
  const LabelTree t = load_tree_file(fixture("minimal_4.json"));
  const Dataset d = generate_synthetic_dataset(t, 2, 9);
  ASSERT_EQ(d.images.size(), 8u);
  std::map<std::string, int> per;
  std::set<std::string> ids;
  for (const ImageRef& img : d.images) {
    ++per[*img.true_class];
    ids.insert(img.image_id);
  }
  EXPECT_EQ(ids.size(), 8u);
  for (NodeId leaf : t.leaves()) EXPECT_EQ(per[t.label(leaf)], 2);
  EXPECT_EQ(d.hash(), generate_synthetic_dataset(t, 2, 9).hash());
  EXPECT_NE(d.hash(), generate_synthetic_dataset(t, 2, 10).hash());
  EXPECT_EQ(d.hash().size(), 16u);
  EXPECT_THROW(generate_synthetic_dataset(t, 0, 1), InvalidArgument);

  const LabelTree big = load_tree_file(fixture("imagenet_like.json"));
  EXPECT_EQ(generate_synthetic_dataset(big, 1, 1).images.size(), 1000u);
}

TEST(Dataset, FileRoundTripAndChecks) {
  const LabelTree t = load_tree_file(fixture("minimal_4.json"));
  const Dataset d = generate_synthetic_dataset(t, 1, 2);
  std::stringstream io;
  save_dataset(io, d);
  const Dataset back = load_dataset(io);
  EXPECT_EQ(back.hash(), d.hash());
  EXPECT_NO_THROW(check_dataset(back, t));

  std::istringstream dup(R"({"images":[{"image_id":"a","true_class":"cat"},
                                       {"image_id":"a","true_class":"dog"}]})");
  EXPECT_THROW(load_dataset(dup), ParseError);
  std::istringstream bad("{\"images\": 3}");
  EXPECT_THROW(load_dataset(bad), ParseError);

  Dataset wrong;
  wrong.images.push_back({"x", "animal", std::nullopt});
  EXPECT_THROW(check_dataset(wrong, t), ConfigError);
  wrong.images[0].true_class.reset();
  EXPECT_THROW(check_dataset(wrong, t), ConfigError);
  EXPECT_THROW(check_dataset(Dataset{}, t), ConfigError);
}

TEST(Config, ParsesFullSchema) {
  const nlohmann::json doc = {
      {"tree", "imagenet_like.json"},
      {"max_depth", 5},
      {"dataset", {{"kind", "synthetic"}, {"per_class", 2}, {"seed", 7}}},
      {"scorer",
       {{"kind", "synthetic"}, {"noise_sigma", 0.1}, {"schedule", "constant"}, {"seed", 2}}},
      {"method", "hdc"},
      {"hdc",
       {{"m_prune", 3},
        {"m_final", 12},
        {"start_level", 2},
        {"strategy", {{"kind", "dynamic-sigma"}, {"ratios", {{"3", 0.25}}}, {"sigma_multiplier", 1.5}}}}},
      {"output_dir", "runs/a"},
      {"workers", 2},
      {"traces", false},
      {"confusion_subtrees", {"animal"}}};
  const ExperimentConfig c = parse_experiment_config(doc, fixture(""));
  EXPECT_EQ(c.tree, fixture("imagenet_like.json"));
  EXPECT_EQ(c.max_depth, 5);
  EXPECT_EQ(c.dataset.per_class, 2);
  EXPECT_EQ(c.scorer.synthetic.schedule, AlphaBarSchedule::kConstant);
  EXPECT_EQ(c.hdc.m_prune, 3);
  EXPECT_EQ(c.hdc.strategy.kind, PruneKind::kDynamicSigma);
  EXPECT_EQ(c.hdc.strategy.ratios.at(3), 0.25);
  EXPECT_EQ(c.hdc.strategy.sigma_multiplier, 1.5);
  EXPECT_EQ(c.output_dir, fixture("") / "runs/a");
  EXPECT_FALSE(c.traces);
  EXPECT_EQ(c.m_final(), 12);
}

TEST(Config, Rejections) {
  auto rejects = [](nlohmann::json doc) {
    EXPECT_THROW(parse_experiment_config(doc, fixture("")), ConfigError) << doc.dump();
  };
  nlohmann::json ok = base_config("minimal_4.json", "flat");
  EXPECT_NO_THROW(parse_experiment_config(ok, fixture("")));
  auto with = [&ok](const std::string& key, nlohmann::json value) {
    nlohmann::json d = ok;
    d[key] = std::move(value);
    return d;
  };
  rejects(with("bogus", 1));
  rejects(with("method", "beam"));
  rejects(with("workers", "two"));
  rejects(with("workers", -1));
  rejects(with("tree", "missing.json"));
  rejects(with("dataset", {{"kind", "synthetic"}, {"per_class", 1}}));
  rejects(with("dataset", {{"kind", "file"}}));
  rejects(with("scorer", {{"kind", "oracle"}}));
  rejects(with("scorer", {{"kind", "replay"}}));
  rejects(with("scorer", {{"kind", "synthetic"}, {"schedule", "cosine"}}));
  rejects(with("hdc", {{"strategy", {{"kind", "beam"}}}}));
  rejects(with("hdc", {{"strategy", {{"ratios", {{"x", 0.5}}}}}}));
  rejects(with("hdc", {{"extra", 1}}));
  nlohmann::json no_tree = ok;
  no_tree.erase("tree");
  rejects(no_tree);
  EXPECT_THROW(load_experiment_config(fixture("absent.json")), ConfigError);
}

TEST(Config, LoadResolvesRelativeToFile) {
  const auto dir = scratch_dir("cfg_rel");
  std::filesystem::copy_file(fixture("minimal_4.json"), dir / "tree.json");
  std::ofstream(dir / "c.json") << R"({"tree": "tree.json", "dataset": {"seed": 1}})";
  const ExperimentConfig c = load_experiment_config(dir / "c.json");
  EXPECT_EQ(c.tree, dir / "tree.json");
  EXPECT_EQ(c.output_dir, dir / "out");
}

TEST(Run, FlatCostIsLeavesTimesSamples) {
  nlohmann::json doc = base_config("minimal_4.json", "flat");
  doc["flat"]["m_final"] = 2;
  doc["tree"] = fixture("eight_leaf.txt").string();
  const ExperimentResult r = run_experiment(config_in(doc, "run_flat"));
  EXPECT_EQ(r.report.images, 8u);
  EXPECT_DOUBLE_EQ(r.report.mean_calls_per_image, 16.0);
  EXPECT_DOUBLE_EQ(r.report.baseline_calls_per_image, 16.0);
  EXPECT_DOUBLE_EQ(r.report.speedup_vs_baseline, 0.0);
  std::set<std::string> written;
  for (const auto& p : r.written) written.insert(p.filename().string());
  EXPECT_EQ(written, (std::set<std::string>{"report.json", "report.csv", "confusion.csv",
                                            "per_class.csv"}));
}

TEST(Run, HdcFullRatioMatchesFlat) {
  nlohmann::json doc = base_config("cifar100_like.json", "flat");
  const ExperimentResult flat = run_experiment(config_in(doc, "k1_flat"));
  doc["method"] = "hdc";
  doc["hdc"]["strategy"] = {{"default_ratio", 1.0}};
  doc["confusion_subtrees"] = {"animal"};
  const ExperimentResult hdc = run_experiment(config_in(doc, "k1_hdc"));
  ASSERT_EQ(flat.outcomes.size(), hdc.outcomes.size());
  for (std::size_t i = 0; i < flat.outcomes.size(); ++i) {
    EXPECT_EQ(flat.outcomes[i].evaluated.ranking, hdc.outcomes[i].evaluated.ranking);
  }
  EXPECT_EQ(flat.report.top_k_overall, hdc.report.top_k_overall);
  EXPECT_EQ(flat.report.dataset_hash, hdc.report.dataset_hash);
  EXPECT_GT(hdc.report.mean_calls_per_image, flat.report.mean_calls_per_image);
  std::size_t traces = 0;
  bool subtree = false;
  for (const auto& p : hdc.written) {
    traces += p.parent_path().filename() == "traces";
    subtree |= p.filename() == "confusion_animal.csv";
  }
  EXPECT_EQ(traces, hdc.outcomes.size());
  EXPECT_TRUE(subtree);
}

TEST(Run, ReportsDeterministicApartFromTiming) {
  nlohmann::json doc = base_config("cifar100_like.json", "hdc");
  const ExperimentConfig a = config_in(doc, "det_a");
  const ExperimentConfig b = config_in(doc, "det_b");
  run_experiment(a);
  run_experiment(b);
  EXPECT_EQ(without_timing(a.output_dir / "report.json"),
            without_timing(b.output_dir / "report.json"));
  EXPECT_EQ(testing::read_file(a.output_dir / "report.csv"),
            testing::read_file(b.output_dir / "report.csv"));
}

TEST(Run, WorkerCountDoesNotChangeResults) {
  nlohmann::json doc = base_config("cifar100_like.json", "hdc");
  doc["hdc"]["strategy"] = {{"kind", "dynamic-sigma"}};
  doc["workers"] = 1;
  const ExperimentResult one = run_experiment(config_in(doc, "w1"));
  doc["workers"] = 4;
  const ExperimentResult four = run_experiment(config_in(doc, "w4"));
  ASSERT_EQ(one.outcomes.size(), four.outcomes.size());
  for (std::size_t i = 0; i < one.outcomes.size(); ++i) {
    EXPECT_EQ(one.outcomes[i].evaluated.image_id, four.outcomes[i].evaluated.image_id);
    EXPECT_EQ(one.outcomes[i].evaluated.ranking, four.outcomes[i].evaluated.ranking);
    EXPECT_EQ(one.outcomes[i].evaluated.metrics.eps_calls_total,
              four.outcomes[i].evaluated.metrics.eps_calls_total);
  }
}

TEST(Run, StartLevelBeyondDepthIsConfigError) {
  nlohmann::json doc = base_config("minimal_4.json", "hdc");
  doc["hdc"]["start_level"] = 5;
  EXPECT_THROW(run_experiment(config_in(doc, "bad_level")), ConfigError);
}

TEST(Run, WarnsWhenPruneSamplesExceedFinal) {
  nlohmann::json doc = base_config("minimal_4.json", "hdc");
  doc["hdc"]["m_prune"] = 20;
  EXPECT_EQ(run_experiment(config_in(doc, "warn")).warnings.size(), 1u);
}

TEST(Run, MaxDepthFlattensTree) {
  nlohmann::json doc = base_config("imagenet_like.json", "hdc");
  doc["max_depth"] = 3;
  doc["dataset"]["per_class"] = 1;
  doc["scorer"]["noise_sigma"] = 0.0;
  doc["hdc"]["strategy"] = {{"default_ratio", 0.5}};
  doc["traces"] = false;
  const ExperimentResult r = run_experiment(config_in(doc, "flatten"));
  EXPECT_EQ(r.report.classes, 1000u);
  EXPECT_DOUBLE_EQ(r.report.top_k_overall.at(1), 100.0);
}

TEST(Run, RecordedMatrixReplaysLocallyAndRemotely) {
  nlohmann::json doc = base_config("synthetic_27.json", "hdc");
  doc["record_matrix"] = true;
  const ExperimentResult live = run_experiment(config_in(doc, "rec"));
  const auto matrix = scratch_dir("rec_matrix") / "m.csv";
  std::filesystem::copy_file(live.written.back(), matrix);
  EXPECT_EQ(live.written.back().filename(), "matrix.csv");

  doc["record_matrix"] = false;
  doc["scorer"] = {{"kind", "replay"}, {"matrix", matrix.string()}};
  const ExperimentResult replay = run_experiment(config_in(doc, "replay_local"));

  doc["scorer"] = {{"kind", "remote"},
                   {"endpoint", std::string("stdio:") + HDC_FAKE_SERVER + " --backend replay:" +
                                    matrix.string()}};
  const ExperimentResult remote = run_experiment(config_in(doc, "replay_remote"));

  for (const ExperimentResult* r : {&replay, &remote}) {
    ASSERT_EQ(r->outcomes.size(), live.outcomes.size());
    for (std::size_t i = 0; i < live.outcomes.size(); ++i) {
      EXPECT_EQ(r->outcomes[i].evaluated.ranking, live.outcomes[i].evaluated.ranking);
    }
    EXPECT_EQ(r->report.mean_calls_per_image, live.report.mean_calls_per_image);
  }
}

TEST(Run, EndpointEnvironmentOverride) {
  nlohmann::json doc = base_config("minimal_4.json", "flat");
  doc["scorer"] = {{"kind", "remote"}, {"endpoint", "tcp://127.0.0.1:1"}};
  const ExperimentConfig c = config_in(doc, "env");
  const std::string endpoint = std::string("stdio:") + HDC_FAKE_SERVER + " --backend const:0.5";
  ::setenv("HDC_SCORER_ENDPOINT", endpoint.c_str(), 1);
  const ExperimentResult r = run_experiment(c);
  ::unsetenv("HDC_SCORER_ENDPOINT");
  EXPECT_EQ(r.report.images, 4u);
  EXPECT_THROW(run_experiment(c), ScorerError);
}

TEST(Compare, IdenticalReportsHaveZeroDelta) {
  const EvalReport a = load_report_file(fixture("report_baseline.json"));
  const Comparison c = compare_reports(a, a);
  EXPECT_EQ(c.speedup, 0.0);
  for (const ComparisonRow& row : c.rows) EXPECT_EQ(row.delta, 0.0) << row.metric;
}

TEST(Compare, FixtureSpeedup) {
  const Comparison c = compare_reports(load_report_file(fixture("report_baseline.json")),
                                       load_report_file(fixture("report_method.json")));
  EXPECT_DOUBLE_EQ(c.speedup, 59.375);
  EXPECT_EQ(c.baseline_method, "flat");
  EXPECT_EQ(c.method, "hdc");
  std::ostringstream out;
  print_comparison(out, c);
  EXPECT_NE(out.str().find("speed-up: 59.38%"), std::string::npos);
  const auto doc = comparison_to_json(c);
  EXPECT_DOUBLE_EQ(doc["speedup"].get<double>(), 59.375);
}

TEST(Compare, DifferentDatasetsRejected) {
  EXPECT_THROW(compare_reports(load_report_file(fixture("report_baseline.json")),
                               load_report_file(fixture("report_other_dataset.json"))),
               InvalidArgument);
}

}  // namespace
}  // namespace hdc
