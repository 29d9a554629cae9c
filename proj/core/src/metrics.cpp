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

#include "hdc/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "hdc/error.hpp"

namespace hdc {

namespace {

std::string number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

double speedup(double baseline_cost, double method_cost) {
  if (!(baseline_cost > 0.0)) throw InvalidArgument("baseline cost must be positive");
  return 100.0 * (1.0 - method_cost / baseline_cost);
}

bool top_k_hit(std::span<const std::string> ranking, std::string_view truth, int k) {
  const auto n = std::min<std::size_t>(ranking.size(), k < 0 ? 0 : static_cast<std::size_t>(k));
  return std::find(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(n), truth) !=
         ranking.begin() + static_cast<std::ptrdiff_t>(n);
}

double classwise_top1(std::span<const Prediction> results) {
  if (results.empty()) throw InvalidArgument("no results to score");
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_class;  // correct, total
  for (const Prediction& p : results) {
    auto& [correct, total] = per_class[p.truth];
    ++total;
    if (p.predicted == p.truth) ++correct;
  }
  double sum = 0.0;
  for (const auto& [label, ct] : per_class) {
    sum += 100.0 * static_cast<double>(ct.first) / static_cast<double>(ct.second);
  }
  return sum / static_cast<double>(per_class.size());
}

std::size_t SubtreeConfusion::total() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t c : counts[i]) n += c;
    n += other[i];
  }
  return n;
}

void SubtreeConfusion::write_csv(std::ostream& out) const {
  out << "truth";
  for (const auto& l : labels) out << ',' << csv_field(l);
  out << ",other\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << csv_field(labels[i]);
    for (std::size_t c : counts[i]) out << ',' << c;
    out << ',' << other[i] << '\n';
  }
}

SubtreeConfusion confusion_subtree(std::span<const Prediction> results, const LabelTree& tree,
                                   NodeId synset) {
  if (tree.is_leaf(synset)) {
    throw InvalidArgument("'" + tree.label(synset) + "' is a class, not a synset");
  }
  SubtreeConfusion m;
  m.synset = synset;
  std::unordered_map<std::string, std::size_t> column;
  for (NodeId leaf : tree.descendant_leaves(synset)) {
    column.emplace(tree.label(leaf), m.labels.size());
    m.labels.push_back(tree.label(leaf));
  }
  m.counts.assign(m.labels.size(), std::vector<std::size_t>(m.labels.size(), 0));
  m.other.assign(m.labels.size(), 0);
  for (const Prediction& p : results) {
    const auto row = column.find(p.truth);
    if (row == column.end()) continue;
    const auto col = column.find(p.predicted);
    if (col == column.end()) {
      ++m.other[row->second];
    } else {
      ++m.counts[row->second][col->second];
    }
  }
  return m;
}

EvalReport build_report(std::string method, std::string dataset_hash,
                        std::span<const EvaluatedImage> images, std::size_t classes,
                        double baseline_calls_per_image) {
  if (images.empty()) throw InvalidArgument("no evaluated images");
  EvalReport r;
  r.method = std::move(method);
  r.dataset_hash = std::move(dataset_hash);
  r.images = images.size();
  r.classes = classes;
  r.baseline_calls_per_image = baseline_calls_per_image;

  std::map<int, std::size_t> hits{{1, 0}, {3, 0}, {5, 0}};
  std::vector<Prediction> predictions;
  std::map<std::string, ClassSummary> per_class;
  double calls = 0, prune = 0, final_calls = 0, surviving = 0;
  for (const EvaluatedImage& img : images) {
    for (auto& [k, n] : hits) {
      if (top_k_hit(img.ranking, img.truth, k)) ++n;
    }
    predictions.push_back({img.truth, img.predicted()});
    ++r.confusion[{img.truth, img.predicted()}];
    ClassSummary& cs = per_class[img.truth];
    cs.label = img.truth;
    ++cs.images;
    if (img.predicted() == img.truth) ++cs.correct;
    cs.mean_calls += static_cast<double>(img.metrics.eps_calls_total);
    calls += static_cast<double>(img.metrics.eps_calls_total);
    prune += static_cast<double>(img.metrics.eps_calls_prune);
    final_calls += static_cast<double>(img.metrics.eps_calls_final);
    surviving += static_cast<double>(img.metrics.surviving_leaves);
  }
  const auto n = static_cast<double>(images.size());
  for (const auto& [k, h] : hits) r.top_k_overall[k] = 100.0 * static_cast<double>(h) / n;
  r.top1_classwise = classwise_top1(predictions);
  r.mean_calls_per_image = calls / n;
  r.mean_calls_prune = prune / n;
  r.mean_calls_final = final_calls / n;
  r.mean_surviving_leaves = surviving / n;
  r.speedup_vs_baseline = speedup(baseline_calls_per_image, r.mean_calls_per_image);
  for (auto& [label, cs] : per_class) {
    cs.mean_calls /= static_cast<double>(cs.images);
    r.per_class.push_back(cs);
  }
  return r;
}

nlohmann::ordered_json report_to_json(const EvalReport& r) {
  nlohmann::ordered_json top_k = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.top_k_overall) top_k[std::to_string(k)] = v;
  nlohmann::ordered_json confusion = nlohmann::ordered_json::array();
  for (const auto& [key, count] : r.confusion) confusion.push_back({key.first, key.second, count});
  nlohmann::ordered_json classes = nlohmann::ordered_json::array();
  for (const ClassSummary& cs : r.per_class) {
    classes.push_back({{"label", cs.label},
                       {"images", cs.images},
                       {"correct", cs.correct},
                       {"mean_calls", cs.mean_calls}});
  }
  nlohmann::ordered_json doc = {{"method", r.method},
                                {"dataset_hash", r.dataset_hash},
                                {"images", r.images},
                                {"classes", r.classes},
                                {"top_k_overall", top_k},
                                {"top1_classwise", r.top1_classwise},
                                {"mean_calls_per_image", r.mean_calls_per_image},
                                {"mean_calls_prune", r.mean_calls_prune},
                                {"mean_calls_final", r.mean_calls_final},
                                {"mean_surviving_leaves", r.mean_surviving_leaves},
                                {"baseline_calls_per_image", r.baseline_calls_per_image},
                                {"speedup_vs_baseline", r.speedup_vs_baseline},
                                {"per_class", classes},
                                {"confusion", confusion}};
  if (r.wall_clock_seconds) doc["timing"] = {{"wall_clock_seconds", *r.wall_clock_seconds}};
  return doc;
}

EvalReport report_from_json(const nlohmann::json& doc) {
  EvalReport r;
  try {
    r.method = doc.at("method").get<std::string>();
    r.dataset_hash = doc.at("dataset_hash").get<std::string>();
    r.images = doc.at("images").get<std::size_t>();
    r.classes = doc.at("classes").get<std::size_t>();
    for (const auto& [k, v] : doc.at("top_k_overall").items()) {
      r.top_k_overall[std::stoi(k)] = v.get<double>();
    }
    r.top1_classwise = doc.at("top1_classwise").get<double>();
    r.mean_calls_per_image = doc.at("mean_calls_per_image").get<double>();
    r.mean_calls_prune = doc.value("mean_calls_prune", 0.0);
    r.mean_calls_final = doc.value("mean_calls_final", 0.0);
    r.mean_surviving_leaves = doc.value("mean_surviving_leaves", 0.0);
    r.baseline_calls_per_image = doc.at("baseline_calls_per_image").get<double>();
    r.speedup_vs_baseline = doc.at("speedup_vs_baseline").get<double>();
    if (doc.contains("per_class")) {
      for (const auto& c : doc.at("per_class")) {
        r.per_class.push_back({c.at("label").get<std::string>(), c.at("images").get<std::size_t>(),
                               c.at("correct").get<std::size_t>(),
                               c.at("mean_calls").get<double>()});
      }
    }
    if (doc.contains("confusion")) {
      for (const auto& e : doc.at("confusion")) {
        r.confusion[{e.at(0).get<std::string>(), e.at(1).get<std::string>()}] =
            e.at(2).get<std::size_t>();
      }
    }
    if (doc.contains("timing")) {
      r.wall_clock_seconds = doc.at("timing").at("wall_clock_seconds").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  return r;
}

void write_report_csv(std::ostream& out, const EvalReport& r) {
  out << "metric,value\n";
  out << "method," << csv_field(r.method) << '\n';
  out << "dataset_hash," << r.dataset_hash << '\n';
  out << "images," << r.images << '\n';
  out << "classes," << r.classes << '\n';
  for (const auto& [k, v] : r.top_k_overall) out << "top" << k << "_overall," << number(v) << '\n';
  out << "top1_classwise," << number(r.top1_classwise) << '\n';
  out << "mean_calls_per_image," << number(r.mean_calls_per_image) << '\n';
  out << "mean_calls_prune," << number(r.mean_calls_prune) << '\n';
  out << "mean_calls_final," << number(r.mean_calls_final) << '\n';
  out << "mean_surviving_leaves," << number(r.mean_surviving_leaves) << '\n';
  out << "baseline_calls_per_image," << number(r.baseline_calls_per_image) << '\n';
  out << "speedup_vs_baseline," << number(r.speedup_vs_baseline) << '\n';
}

void write_confusion_csv(std::ostream& out, const EvalReport& r) {
  out << "truth,predicted,count\n";
  for (const auto& [key, count] : r.confusion) {
    out << csv_field(key.first) << ',' << csv_field(key.second) << ',' << count << '\n';
  }
}

void write_per_class_csv(std::ostream& out, const EvalReport& r) {
  out << "label,images,correct,top1,mean_calls\n";
  for (const ClassSummary& cs : r.per_class) {
    out << csv_field(cs.label) << ',' << cs.images << ',' << cs.correct << ','
        << number(100.0 * static_cast<double>(cs.correct) / static_cast<double>(cs.images)) << ','
        << number(cs.mean_calls) << '\n';
  }
}

}  // namespace hdc
