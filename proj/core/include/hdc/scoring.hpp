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

#ifndef HDC_SCORING_HPP_
#define HDC_SCORING_HPP_

// The scorer abstraction. A scorer computes the noise-prediction error
// d(eps, x_t, c) = ||eps - eps_theta(x_t, c)||^2 for one image, one prompt and
// one (timestep, noise) draw. Each call to Scorer::score is one
// eps-prediction, the cost unit of the whole engine.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace hdc {

inline constexpr int kDefaultTMax = 1000;
inline constexpr std::string_view kLabelPlaceholder = "{label}";
inline constexpr std::string_view kDefaultPromptTemplate = "A photo of a {label}";

struct ImageRef {
  std::string image_id;
  std::optional<std::string> true_class;
  // Raw pixels for scorers that need them; the engine never inspects them.
  std::optional<std::vector<std::uint8_t>> payload;
};

struct SamplePoint {
  int t = 1;
  std::uint64_t noise_id = 0;

  friend bool operator==(const SamplePoint&, const SamplePoint&) = default;
};

// A fixed Monte Carlo draw set shared by every label scored against it.
struct SampleSet {
  std::vector<SamplePoint> samples;
  std::uint64_t seed = 0;
  int t_max = kDefaultTMax;

  std::size_t size() const { return samples.size(); }
  friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

// m draws with t uniform on [1, t_max]; a pure function of its arguments.
SampleSet build_sample_set(std::uint64_t seed, int m, int t_max = kDefaultTMax);

// Derives the seed of an independent sample set from a parent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0);

struct Prompt {
  std::string template_text;
  std::string label;
  std::string rendered;
};

// Substitutes `label` for the single "{label}" placeholder in `template_text`.
Prompt render_prompt(std::string_view template_text, std::string_view label);

struct ScoreRequest {
  const ImageRef& image;
  const Prompt& prompt;
  SamplePoint sample;
};

class Scorer {
 public:
  virtual ~Scorer() = default;

  // Returns a finite nonnegative error. Must be safe to call concurrently.
  virtual double score(const ScoreRequest& request) const = 0;
};

// Calls `scorer` and rethrows any failure as ScorerError carrying the
// (image, label, sample) context. Rejects non-finite or negative results.
double score_checked(const Scorer& scorer, const ScoreRequest& request);

// Forwards to another scorer and counts calls. With duplicate tracking on,
// also counts requests whose (image, prompt, t, noise) key was seen before.
class CountingScorer final : public Scorer {
 public:
  explicit CountingScorer(const Scorer& inner, bool track_duplicates = false)
      : inner_(inner), track_duplicates_(track_duplicates) {}

  double score(const ScoreRequest& request) const override;

  std::size_t calls() const { return calls_.load(); }
  std::size_t duplicates() const;
  void reset();

 private:
  using Key = std::tuple<std::string, std::string, int, std::uint64_t>;

  const Scorer& inner_;
  bool track_duplicates_;
  mutable std::atomic<std::size_t> calls_{0};
  mutable std::mutex mu_;
  mutable std::set<Key> seen_;
  mutable std::size_t duplicates_ = 0;
};

}  // namespace hdc

#endif  // HDC_SCORING_HPP_
