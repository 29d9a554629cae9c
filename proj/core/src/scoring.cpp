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

#include "hdc/scoring.hpp"

#include <cmath>
#include <string>

#include "hdc/error.hpp"
#include "hdc/hashing.hpp"

namespace hdc {

namespace {

constexpr std::uint64_t kTimestepStream = 0x74;
constexpr std::uint64_t kNoiseStream = 0x6e;

std::string request_context(const ScoreRequest& request) {
  return "image '" + request.image.image_id + "' label '" + request.prompt.label +
         "' t=" + std::to_string(request.sample.t) +
         " noise=" + std::to_string(request.sample.noise_id);
}

}  // namespace

SampleSet build_sample_set(std::uint64_t seed, int m, int t_max) {
  if (m < 1) throw InvalidArgument("sample count must be >= 1");
  if (t_max < 1) throw InvalidArgument("t_max must be >= 1");
  SampleSet set{{}, seed, t_max};
  set.samples.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto index = static_cast<std::uint64_t>(i);
    const int t = 1 + static_cast<int>(bounded(hash_values(seed, index, kTimestepStream),
                                               static_cast<std::uint64_t>(t_max)));
    set.samples.push_back({t, hash_values(seed, index, kNoiseStream)});
  }
  return set;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t index) {
  return hash_values(seed, fnv1a64(purpose), index);
}

Prompt render_prompt(std::string_view template_text, std::string_view label) {
  const std::size_t first = template_text.find(kLabelPlaceholder);
  if (first == std::string_view::npos) {
    throw InvalidArgument("prompt template '" + std::string(template_text) +
                          "' has no {label} placeholder");
  }
  if (template_text.find(kLabelPlaceholder, first + 1) != std::string_view::npos) {
    throw InvalidArgument("prompt template '" + std::string(template_text) +
                          "' has more than one {label} placeholder");
  }
  Prompt prompt{std::string(template_text), std::string(label), std::string(template_text)};
  prompt.rendered.replace(first, kLabelPlaceholder.size(), label);
  return prompt;
}

double score_checked(const Scorer& scorer, const ScoreRequest& request) {
  double value = 0.0;
  try {
    value = scorer.score(request);
  } catch (const ProtocolError& e) {
    throw ProtocolError(request_context(request) + ": " + e.what());
  } catch (const std::exception& e) {
    throw ScorerError(request_context(request) + ": " + e.what());
  }
  if (!std::isfinite(value) || value < 0.0) {
    throw ScorerError(request_context(request) + ": scorer returned " + std::to_string(value) +
                      ", expected a finite nonnegative error");
  }
  return value;
}

double CountingScorer::score(const ScoreRequest& request) const {
  calls_.fetch_add(1);
  if (track_duplicates_) {
    std::lock_guard lock(mu_);
    Key key{request.image.image_id, request.prompt.rendered, request.sample.t,
            request.sample.noise_id};
    if (!seen_.insert(std::move(key)).second) ++duplicates_;
  }
  return inner_.score(request);
}

std::size_t CountingScorer::duplicates() const {
  std::lock_guard lock(mu_);
  return duplicates_;
}

void CountingScorer::reset() {
  std::lock_guard lock(mu_);
  calls_ = 0;
  seen_.clear();
  duplicates_ = 0;
}

}  // namespace hdc
