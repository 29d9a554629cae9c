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

#ifndef HDC_REMOTE_SCORER_HPP_
#define HDC_REMOTE_SCORER_HPP_

// Client for the "hdc-scorer/1" wire protocol. After connecting, the server
// sends one handshake line containing the protocol version. Each request is
// one JSON document per line:
//   {"id":1,"image_id":"img7","prompt":"A photo of a hammer","label":"hammer",
//    "t":513,"noise_id":42,"payload_b64":"..."}
// and each response is {"id":1,"error":0.8812} or {"id":1,"fault":"..."}.
// "label" is an additive field so replay backends can key on the class.
//
// One request is in flight per connection: concurrent score() calls are
// serialized by an internal mutex.

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "hdc/scoring.hpp"

namespace hdc {

inline constexpr std::string_view kProtocolVersion = "hdc-scorer/1";
inline constexpr std::string_view kEndpointEnvVar = "HDC_SCORER_ENDPOINT";

struct Endpoint {
  enum class Kind { kTcp, kStdio };

  Kind kind = Kind::kTcp;
  std::string host;
  int port = 0;
  // Program and arguments for stdio endpoints.
  std::vector<std::string> command;
};

// "tcp://host:port" or "stdio:program arg1 arg2" (arguments split on spaces).
Endpoint parse_endpoint(std::string_view text);

class LineTransport {
 public:
  virtual ~LineTransport() = default;
  virtual void write_line(std::string_view line) = 0;
  // Throws ProtocolError on EOF.
  virtual std::string read_line() = 0;
};

std::unique_ptr<LineTransport> connect(const Endpoint& endpoint);

class RemoteScorer final : public Scorer {
 public:
  explicit RemoteScorer(const Endpoint& endpoint);
  explicit RemoteScorer(std::unique_ptr<LineTransport> transport);

  double score(const ScoreRequest& request) const override;
  const std::string& handshake() const { return handshake_; }

 private:
  mutable std::mutex mu_;
  std::unique_ptr<LineTransport> transport_;
  std::string handshake_;
  mutable std::int64_t next_id_ = 1;
};

std::string base64_encode(const std::vector<std::uint8_t>& bytes);

}  // namespace hdc

#endif  // HDC_REMOTE_SCORER_HPP_
