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

#include "fake_protocol.hpp"

#include <nlohmann/json.hpp>

#include "hdc/hashing.hpp"

namespace hdc::testing {

std::string fake_handshake() { return R"({"protocol":"hdc-scorer/1","server":"fake"})"; }

double fake_hash_score(const std::string& image_id, const std::string& label, int t,
                       std::uint64_t noise_id) {
  return unit_interval(hash_values(fnv1a64(image_id), fnv1a64(label),
                                   static_cast<std::uint64_t>(t), noise_id));
}

std::string fake_reply(const std::string& request_line, const FakeServerOptions& options) {
  nlohmann::json req;
  try {
    req = nlohmann::json::parse(request_line);
  } catch (const nlohmann::json::parse_error&) {
    return R"({"id":-1,"fault":"malformed request"})";
  }
  const auto id = req.value("id", std::int64_t{-1});
  switch (options.misbehavior) {
    case Misbehavior::kWrongId:
      return nlohmann::json{{"id", id + 1}, {"error", 0.5}}.dump();
    case Misbehavior::kNegative:
      return nlohmann::json{{"id", id}, {"error", -1.0}}.dump();
    case Misbehavior::kGarbage:
      return "this is not json";
    case Misbehavior::kMissingError:
      return nlohmann::json{{"id", id}}.dump();
    case Misbehavior::kNone:
      break;
  }
  const std::string image = req.value("image_id", "");
  const std::string label = req.value("label", "");
  const int t = req.value("t", 0);
  const auto noise = req.value("noise_id", std::uint64_t{0});
  if (!options.fault_label.empty() && label == options.fault_label) {
    return nlohmann::json{{"id", id}, {"fault", "refusing label " + label}}.dump();
  }
  double value = options.constant;
  if (options.backend == FakeServerOptions::Backend::kHash) {
    value = fake_hash_score(image, label, t, noise);
  } else if (options.backend == FakeServerOptions::Backend::kReplay) {
    const auto hit = options.matrix->find({image, label, t, noise});
    if (!hit) return nlohmann::json{{"id", id}, {"fault", "unknown key"}}.dump();
    value = *hit;
  }
  return nlohmann::json{{"id", id}, {"error", value}}.dump();
}

}  // namespace hdc::testing
