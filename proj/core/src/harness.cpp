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

#include "hdc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hdc/error.hpp"
#include "hdc/hashing.hpp"
#include "hdc/score_matrix.hpp"

namespace hdc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

std::string file_stem_for(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

void require_object(const json& obj, const char* what) {
  if (!obj.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                    const char* what) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(std::string("unknown field '") + key + "' in " + what);
    }
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

PruneStrategy parse_strategy(const json& obj) {
  require_object(obj, "hdc.strategy");
  reject_unknown(obj, {"kind", "default_ratio", "ratios", "sigma_multiplier"}, "hdc.strategy");
  PruneStrategy s;
  s.kind = parse_prune_kind(get_or<std::string>(obj, "kind", "fixed-topk"));
  s.default_ratio = get_or(obj, "default_ratio", s.default_ratio);
  s.sigma_multiplier = get_or(obj, "sigma_multiplier", s.sigma_multiplier);
  if (obj.contains("ratios")) {
    require_object(obj.at("ratios"), "hdc.strategy.ratios");
    for (const auto& [key, value] : obj.at("ratios").items()) {
      int depth = 0;
      try {
        depth = std::stoi(key);
      } catch (const std::exception&) {
        throw ConfigError("ratio key '" + key + "' is not a depth");
      }
      if (!value.is_number()) throw ConfigError("ratio for depth " + key + " is not a number");
      s.ratios[depth] = value.get<double>();
    }
  }
  return s;
}

FlatConfig parse_flat(const json& obj) {
  require_object(obj, "flat");
  reject_unknown(obj, {"m_final", "sample_seed", "prompt_template", "t_max"}, "flat");
  FlatConfig c;
  c.m_final = get_or(obj, "m_final", c.m_final);
  c.sample_seed = get_or(obj, "sample_seed", c.sample_seed);
  c.prompt_template = get_or(obj, "prompt_template", c.prompt_template);
  c.t_max = get_or(obj, "t_max", c.t_max);
  return c;
}

HdcConfig parse_hdc(const json& obj) {
  require_object(obj, "hdc");
  reject_unknown(obj,
                 {"m_prune", "m_final", "start_level", "sample_seed", "prompt_template", "t_max",
                  "strategy"},
                 "hdc");
  HdcConfig c;
  c.m_prune = get_or(obj, "m_prune", c.m_prune);
  c.m_final = get_or(obj, "m_final", c.m_final);
  c.start_level = get_or(obj, "start_level", c.start_level);
  c.sample_seed = get_or(obj, "sample_seed", c.sample_seed);
  c.prompt_template = get_or(obj, "prompt_template", c.prompt_template);
  c.t_max = get_or(obj, "t_max", c.t_max);
  if (obj.contains("strategy")) c.strategy = parse_strategy(obj.at("strategy"));
  return c;
}

ScorerSpec parse_scorer(const json& obj, const fs::path& base) {
  require_object(obj, "scorer");
  ScorerSpec s;
  const std::string kind = get_or<std::string>(obj, "kind", "synthetic");
  if (kind == "synthetic") {
    reject_unknown(obj,
                   {"kind", "base_error", "distance_gain", "noise_sigma", "schedule",
                    "constant_alpha_bar", "seed"},
                   "scorer");
    s.kind = ScorerSpec::Kind::kSynthetic;
    SyntheticScorerConfig& c = s.synthetic;
    c.base_error = get_or(obj, "base_error", c.base_error);
    c.distance_gain = get_or(obj, "distance_gain", c.distance_gain);
    c.noise_sigma = get_or(obj, "noise_sigma", c.noise_sigma);
    c.constant_alpha_bar = get_or(obj, "constant_alpha_bar", c.constant_alpha_bar);
    c.seed = get_or(obj, "seed", c.seed);
    const std::string schedule = get_or<std::string>(obj, "schedule", "linear");
    if (schedule == "linear") {
      c.schedule = AlphaBarSchedule::kLinear;
    } else if (schedule == "constant") {
      c.schedule = AlphaBarSchedule::kConstant;
    } else {
      throw ConfigError("unknown schedule '" + schedule + "' (expected linear or constant)");
    }
  } else if (kind == "replay") {
    reject_unknown(obj, {"kind", "matrix"}, "scorer");
    s.kind = ScorerSpec::Kind::kReplay;
    if (!obj.contains("matrix")) throw ConfigError("replay scorer needs 'matrix'");
    s.matrix = resolve(base, get_or<std::string>(obj, "matrix", ""));
  } else if (kind == "remote") {
    reject_unknown(obj, {"kind", "endpoint"}, "scorer");
    s.kind = ScorerSpec::Kind::kRemote;
    s.endpoint = get_or<std::string>(obj, "endpoint", "");
  } else {
    throw ConfigError("unknown scorer kind '" + kind + "'");
  }
  return s;
}

DatasetSpec parse_dataset(const json& obj, const fs::path& base) {
  require_object(obj, "dataset");
  DatasetSpec d;
  const std::string kind = get_or<std::string>(obj, "kind", "synthetic");
  if (kind == "synthetic") {
    reject_unknown(obj, {"kind", "per_class", "seed"}, "dataset");
    d.kind = DatasetSpec::Kind::kSynthetic;
    d.per_class = get_or(obj, "per_class", d.per_class);
    if (!obj.contains("seed")) throw ConfigError("synthetic dataset needs a 'seed'");
    d.seed = get_or(obj, "seed", d.seed);
  } else if (kind == "file") {
    reject_unknown(obj, {"kind", "path"}, "dataset");
    d.kind = DatasetSpec::Kind::kFile;
    if (!obj.contains("path")) throw ConfigError("file dataset needs 'path'");
    d.path = resolve(base, get_or<std::string>(obj, "path", ""));
  } else {
    throw ConfigError("unknown dataset kind '" + kind + "'");
  }
  return d;
}

}  // namespace

std::string Dataset::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (const ImageRef& img : images) {
    feed(img.image_id);
    feed(img.true_class.value_or(""));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Dataset generate_synthetic_dataset(const LabelTree& tree, int per_class, std::uint64_t seed) {
  if (per_class < 1) throw InvalidArgument("per_class must be >= 1");
  std::vector<std::string> classes;
  classes.reserve(tree.leaf_count() * static_cast<std::size_t>(per_class));
  for (NodeId leaf : tree.leaves()) {
    for (int i = 0; i < per_class; ++i) classes.push_back(tree.label(leaf));
  }
  for (std::size_t i = classes.size(); i > 1; --i) {
    const auto j = bounded(hash_values(seed, i, 0x73687566ULL), i);
    std::swap(classes[i - 1], classes[j]);
  }
  Dataset d;
  d.seed = seed;
  d.images.reserve(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    d.images.push_back(
        {"img-" + std::to_string(seed) + "-" + std::to_string(i), classes[i], std::nullopt});
  }
  return d;
}

Dataset load_dataset(std::istream& in) {
  Dataset d;
  try {
    const json doc = json::parse(in);
    d.seed = doc.value("seed", std::uint64_t{0});
    for (const json& img : doc.at("images")) {
      ImageRef ref;
      ref.image_id = img.at("image_id").get<std::string>();
      if (ref.image_id.empty()) throw ParseError("empty image_id");
      if (img.contains("true_class")) ref.true_class = img.at("true_class").get<std::string>();
      d.images.push_back(std::move(ref));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("dataset: ") + e.what());
  }
  std::vector<std::string> ids;
  for (const ImageRef& img : d.images) ids.push_back(img.image_id);
  std::sort(ids.begin(), ids.end());
  const auto dup = std::adjacent_find(ids.begin(), ids.end());
  if (dup != ids.end()) throw ParseError("duplicate image_id '" + *dup + "'");
  return d;
}

Dataset load_dataset_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  return load_dataset(in);
}

void save_dataset(std::ostream& out, const Dataset& dataset) {
  out << "{\"seed\": " << dataset.seed << ", \"images\": [\n";
  for (std::size_t i = 0; i < dataset.images.size(); ++i) {
    const ImageRef& img = dataset.images[i];
    nlohmann::ordered_json row = {{"image_id", img.image_id}};
    if (img.true_class) row["true_class"] = *img.true_class;
    out << "  " << row.dump() << (i + 1 < dataset.images.size() ? ",\n" : "\n");
  }
  out << "]}\n";
}

void save_dataset_file(const fs::path& path, const Dataset& dataset) {
  std::ofstream out = open_out(path);
  save_dataset(out, dataset);
}

void check_dataset(const Dataset& dataset, const LabelTree& tree) {
  if (dataset.images.empty()) throw ConfigError("dataset has no images");
  for (const ImageRef& img : dataset.images) {
    if (!img.true_class) throw ConfigError("image '" + img.image_id + "' has no true_class");
    if (!tree.find_leaf(*img.true_class)) {
      throw ConfigError("image '" + img.image_id + "' has true_class '" + *img.true_class +
                        "' which is not a class of the tree");
    }
  }
}

void ExperimentConfig::validate() const {
  if (max_depth && *max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (dataset.kind == DatasetSpec::Kind::kSynthetic && dataset.per_class < 1) {
    throw ConfigError("dataset.per_class must be >= 1");
  }
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (method == Method::kFlat) {
    flat.validate();
  } else {
    hdc.validate();
  }
  auto must_exist = [](const fs::path& p, const char* what) {
    if (!fs::exists(p)) throw ConfigError(std::string(what) + " '" + p.string() + "' not found");
  };
  must_exist(tree, "tree");
  if (dataset.kind == DatasetSpec::Kind::kFile) must_exist(dataset.path, "dataset");
  if (scorer.kind == ScorerSpec::Kind::kReplay) must_exist(scorer.matrix, "matrix");
}

ExperimentConfig parse_experiment_config(const json& doc, const fs::path& base_dir) {
  require_object(doc, "config");
  reject_unknown(doc,
                 {"tree", "max_depth", "dataset", "scorer", "method", "flat", "hdc", "output_dir",
                  "workers", "traces", "record_matrix", "confusion_subtrees"},
                 "config");
  ExperimentConfig c;
  if (!doc.contains("tree")) throw ConfigError("config needs 'tree'");
  c.tree = resolve(base_dir, get_or<std::string>(doc, "tree", ""));
  if (doc.contains("max_depth")) c.max_depth = get_or(doc, "max_depth", 0);
  if (doc.contains("dataset")) c.dataset = parse_dataset(doc.at("dataset"), base_dir);
  if (doc.contains("scorer")) c.scorer = parse_scorer(doc.at("scorer"), base_dir);
  c.method = parse_method(get_or<std::string>(doc, "method", "hdc"));
  if (doc.contains("flat")) c.flat = parse_flat(doc.at("flat"));
  if (doc.contains("hdc")) c.hdc = parse_hdc(doc.at("hdc"));
  c.output_dir = resolve(base_dir, get_or<std::string>(doc, "output_dir", "out"));
  c.workers = get_or(doc, "workers", c.workers);
  c.traces = get_or(doc, "traces", c.traces);
  c.record_matrix = get_or(doc, "record_matrix", c.record_matrix);
  c.confusion_subtrees = get_or(doc, "confusion_subtrees", c.confusion_subtrees);
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return parse_experiment_config(doc, path.parent_path());
}

std::string_view to_string(Method method) { return method == Method::kFlat ? "flat" : "hdc"; }

Method parse_method(std::string_view text) {
  if (text == "flat") return Method::kFlat;
  if (text == "hdc") return Method::kHdc;
  throw ConfigError("unknown method '" + std::string(text) + "' (expected flat or hdc)");
}

std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec, const LabelTree& tree, int t_max) {
  switch (spec.kind) {
    case ScorerSpec::Kind::kSynthetic: {
      SyntheticScorerConfig c = spec.synthetic;
      c.t_max = t_max;
      return std::make_unique<SyntheticScorer>(tree, c);
    }
    case ScorerSpec::Kind::kReplay:
      return std::make_unique<ReplayScorer>(load_score_matrix_file(spec.matrix));
    case ScorerSpec::Kind::kRemote: {
      std::string endpoint = spec.endpoint;
      if (const char* env = std::getenv(std::string(kEndpointEnvVar).c_str()); env && *env) {
        endpoint = env;
      }
      if (endpoint.empty()) {
        throw ConfigError("remote scorer has no endpoint (set 'endpoint' or " +
                          std::string(kEndpointEnvVar) + ")");
      }
      return std::make_unique<RemoteScorer>(parse_endpoint(endpoint));
    }
  }
  throw std::logic_error("unreachable scorer kind");
}

std::vector<ImageOutcome> evaluate_dataset(const LabelTree& tree, const Dataset& dataset,
                                           const Scorer& scorer, const EvalOptions& options) {
  const std::size_t n = dataset.images.size();
  std::vector<ImageOutcome> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto classify_one = [&](std::size_t i) {
    const ImageRef& image = dataset.images[i];
    ImageOutcome& out = results[i];
    out.evaluated.image_id = image.image_id;
    out.evaluated.truth = image.true_class.value_or("");
    ClassificationResult result;
    if (options.method == Method::kFlat) {
      result = classify_flat(tree, image, scorer, options.flat);
    } else {
      HdcResult hdc = classify_hdc(tree, image, scorer, options.hdc);
      result = std::move(hdc.classification);
      out.trace = std::move(hdc.trace);
    }
    out.evaluated.ranking = result.ranked_labels();
    out.evaluated.metrics = result.metrics;
  };
  auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        classify_one(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };

  std::size_t workers = options.workers > 0 ? static_cast<std::size_t>(options.workers)
                                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult out;
  const LabelTree source = load_tree_file(config.tree);
  const LabelTree tree = config.max_depth ? limit_depth(source, *config.max_depth) : source;

  Dataset dataset;
  if (config.dataset.kind == DatasetSpec::Kind::kSynthetic) {
    dataset = generate_synthetic_dataset(tree, config.dataset.per_class, config.dataset.seed);
  } else {
    dataset = load_dataset_file(config.dataset.path);
  }
  check_dataset(dataset, tree);

  if (config.method == Method::kHdc) {
    out.warnings = config.hdc.validate();
    if (config.hdc.start_level > tree.depth()) {
      throw ConfigError("hdc.start_level " + std::to_string(config.hdc.start_level) +
                        " exceeds tree depth " + std::to_string(tree.depth()));
    }
  }

  // The synthetic ground truth is the unflattened hierarchy.
  const std::unique_ptr<Scorer> base = make_scorer(config.scorer, source, config.t_max());
  std::optional<RecordingScorer> recorder;
  if (config.record_matrix) recorder.emplace(*base);
  const Scorer& scorer = recorder ? static_cast<const Scorer&>(*recorder) : *base;

  const auto start = std::chrono::steady_clock::now();
  out.outcomes =
      evaluate_dataset(tree, dataset, scorer, {config.method, config.flat, config.hdc, config.workers});
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<EvaluatedImage> evaluated;
  evaluated.reserve(out.outcomes.size());
  for (const ImageOutcome& o : out.outcomes) evaluated.push_back(o.evaluated);
  out.report = build_report(std::string(to_string(config.method)), dataset.hash(), evaluated,
                            tree.leaf_count(),
                            static_cast<double>(tree.leaf_count()) * config.m_final());
  out.report.wall_clock_seconds = seconds;

  fs::create_directories(config.output_dir);
  auto write = [&](const fs::path& path, auto&& body) {
    std::ofstream f = open_out(path);
    body(f);
    out.written.push_back(path);
  };
  write(config.output_dir / "report.json",
        [&](std::ostream& f) { f << report_to_json(out.report).dump(2) << '\n'; });
  write(config.output_dir / "report.csv", [&](std::ostream& f) { write_report_csv(f, out.report); });
  write(config.output_dir / "confusion.csv",
        [&](std::ostream& f) { write_confusion_csv(f, out.report); });
  write(config.output_dir / "per_class.csv",
        [&](std::ostream& f) { write_per_class_csv(f, out.report); });

  if (!config.confusion_subtrees.empty()) {
    std::vector<Prediction> predictions;
    for (const EvaluatedImage& e : evaluated) predictions.push_back({e.truth, e.predicted()});
    for (const std::string& name : config.confusion_subtrees) {
      std::optional<NodeId> synset;
      for (NodeId id : tree.find_label(name)) {
        if (!tree.is_leaf(id)) {
          synset = id;
          break;
        }
      }
      if (!synset) throw ConfigError("confusion subtree '" + name + "' is not a synset");
      const SubtreeConfusion m = confusion_subtree(predictions, tree, *synset);
      write(config.output_dir / ("confusion_" + file_stem_for(name) + ".csv"),
            [&](std::ostream& f) { m.write_csv(f); });
    }
  }

  if (config.method == Method::kHdc && config.traces) {
    const fs::path dir = config.output_dir / "traces";
    fs::create_directories(dir);
    for (const ImageOutcome& o : out.outcomes) {
      write(dir / (file_stem_for(o.evaluated.image_id) + ".json"),
            [&](std::ostream& f) { f << trace_to_json(*o.trace, tree).dump(2) << '\n'; });
    }
  }

  if (recorder) {
    const ScoreMatrix matrix = recorder->snapshot();
    const fs::path path = config.output_dir / "matrix.csv";
    save_score_matrix_file(path, matrix);
    out.written.push_back(path);
  }
  return out;
}

Comparison compare_reports(const EvalReport& baseline, const EvalReport& method) {
  if (baseline.dataset_hash != method.dataset_hash) {
    throw InvalidArgument("reports come from different datasets (" + baseline.dataset_hash +
                          " vs " + method.dataset_hash + ")");
  }
  Comparison c;
  c.dataset_hash = baseline.dataset_hash;
  c.baseline_method = baseline.method;
  c.method = method.method;
  auto add = [&c](std::string name, double b, double m) {
    c.rows.push_back({std::move(name), b, m, m - b});
  };
  for (int k : {1, 3, 5}) {
    const auto get = [k](const EvalReport& r) {
      const auto it = r.top_k_overall.find(k);
      return it == r.top_k_overall.end() ? 0.0 : it->second;
    };
    add("top" + std::to_string(k), get(baseline), get(method));
  }
  add("top1_classwise", baseline.top1_classwise, method.top1_classwise);
  add("mean_calls_per_image", baseline.mean_calls_per_image, method.mean_calls_per_image);
  add("mean_calls_prune", baseline.mean_calls_prune, method.mean_calls_prune);
  add("mean_calls_final", baseline.mean_calls_final, method.mean_calls_final);
  add("mean_surviving_leaves", baseline.mean_surviving_leaves, method.mean_surviving_leaves);
  c.speedup = speedup(baseline.mean_calls_per_image, method.mean_calls_per_image);
  return c;
}

void print_comparison(std::ostream& out, const Comparison& c) {
  char line[160];
  out << "dataset " << c.dataset_hash << "  baseline=" << c.baseline_method
      << "  method=" << c.method << '\n';
  std::snprintf(line, sizeof line, "%-24s %12s %12s %12s\n", "metric", "baseline", "method",
                "delta");
  out << line;
  for (const ComparisonRow& r : c.rows) {
    std::snprintf(line, sizeof line, "%-24s %12.2f %12.2f %+12.2f\n", r.metric.c_str(),
                  r.baseline, r.method, r.delta);
    out << line;
  }
  std::snprintf(line, sizeof line, "speed-up: %.2f%%\n", c.speedup);
  out << line;
}

nlohmann::ordered_json comparison_to_json(const Comparison& c) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ComparisonRow& r : c.rows) {
    rows.push_back(
        {{"metric", r.metric}, {"baseline", r.baseline}, {"method", r.method}, {"delta", r.delta}});
  }
  return {{"dataset_hash", c.dataset_hash},
          {"baseline_method", c.baseline_method},
          {"method", c.method},
          {"rows", rows},
          {"speedup", c.speedup}};
}

EvalReport load_report_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  try {
    return report_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError("report '" + path.string() + "': " + e.what());
  }
}

}  // namespace hdc
