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

#include "hdc/remote_scorer.hpp"

#include <netdb.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hdc/error.hpp"

namespace hdc {

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

// Line framing over a connected stream socket.
class SocketLines : public LineTransport {
 public:
  explicit SocketLines(int fd) : fd_(fd) {}
  ~SocketLines() override {
    if (fd_ >= 0) ::close(fd_);
  }
  SocketLines(const SocketLines&) = delete;
  SocketLines& operator=(const SocketLines&) = delete;

  void write_line(std::string_view line) override {
    std::string buf(line);
    buf += '\n';
    std::size_t sent = 0;
    while (sent < buf.size()) {
      const ssize_t n = ::send(fd_, buf.data() + sent, buf.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(errno_text("send to scorer"));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::string read_line() override {
    for (;;) {
      const std::size_t nl = pending_.find('\n');
      if (nl != std::string::npos) {
        std::string line = pending_.substr(0, nl);
        pending_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      char chunk[4096];
      const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(errno_text("receive from scorer"));
      }
      if (n == 0) throw ProtocolError("scorer closed the connection");
      pending_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 protected:
  int fd_;

 private:
  std::string pending_;
};

int connect_tcp(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &result); rc != 0) {
    throw ProtocolError("resolve " + host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(result);
  if (fd < 0) throw ProtocolError("cannot connect to scorer at " + host + ":" + service);
  return fd;
}

// Runs the server as a child process whose stdin and stdout are one end of a
// socketpair, so writes never raise SIGPIPE.
class ChildProcessLines final : public SocketLines {
 public:
  ChildProcessLines(int fd, pid_t pid) : SocketLines(fd), pid_(pid) {}
  ~ChildProcessLines() override {
    ::shutdown(fd_, SHUT_RDWR);
    int status = 0;
    if (::waitpid(pid_, &status, WNOHANG) == 0) {
      ::kill(pid_, SIGTERM);
      ::waitpid(pid_, &status, 0);
    }
  }

 private:
  pid_t pid_;
};

std::unique_ptr<LineTransport> spawn(const std::vector<std::string>& command) {
  if (command.empty()) throw InvalidArgument("stdio endpoint needs a command");
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) throw ProtocolError(errno_text("socketpair"));
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw ProtocolError(errno_text("fork"));
  }
  if (pid == 0) {
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    std::vector<char*> argv;
    for (const auto& arg : command) argv.push_back(const_cast<char*>(arg.c_str()));
    argv.push_back(nullptr);
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }
  ::close(fds[1]);
  return std::make_unique<ChildProcessLines>(fds[0], pid);
}

}  // namespace

Endpoint parse_endpoint(std::string_view text) {
  Endpoint ep;
  if (text.starts_with("tcp://") || text.starts_with("tcp:")) {
    text.remove_prefix(text.starts_with("tcp://") ? 6 : 4);
    const std::size_t colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
      throw InvalidArgument("tcp endpoint must be tcp://host:port");
    }
    ep.kind = Endpoint::Kind::kTcp;
    ep.host = std::string(text.substr(0, colon));
    try {
      std::size_t used = 0;
      const std::string port(text.substr(colon + 1));
      ep.port = std::stoi(port, &used);
      if (used != port.size() || ep.port <= 0 || ep.port > 65535) throw std::out_of_range("port");
    } catch (const std::exception&) {
      throw InvalidArgument("bad port in endpoint '" + std::string(text) + "'");
    }
    return ep;
  }
  if (text.starts_with("stdio:")) {
    text.remove_prefix(6);
    ep.kind = Endpoint::Kind::kStdio;
    std::istringstream words{std::string(text)};
    for (std::string w; words >> w;) ep.command.push_back(w);
    if (ep.command.empty()) throw InvalidArgument("stdio endpoint needs a command");
    return ep;
  }
  throw InvalidArgument("endpoint must start with tcp:// or stdio:");
}

std::unique_ptr<LineTransport> connect(const Endpoint& endpoint) {
  if (endpoint.kind == Endpoint::Kind::kStdio) return spawn(endpoint.command);
  return std::make_unique<SocketLines>(connect_tcp(endpoint.host, endpoint.port));
}

RemoteScorer::RemoteScorer(const Endpoint& endpoint) : RemoteScorer(connect(endpoint)) {}

RemoteScorer::RemoteScorer(std::unique_ptr<LineTransport> transport)
    : transport_(std::move(transport)) {
  handshake_ = transport_->read_line();
  if (handshake_.find(kProtocolVersion) == std::string::npos) {
    throw ProtocolError("scorer handshake '" + handshake_ + "' does not advertise " +
                        std::string(kProtocolVersion));
  }
}

double RemoteScorer::score(const ScoreRequest& request) const {
  std::lock_guard lock(mu_);
  const std::int64_t id = next_id_++;
  nlohmann::ordered_json msg = {{"id", id},
                                {"image_id", request.image.image_id},
                                {"prompt", request.prompt.rendered},
                                {"label", request.prompt.label},
                                {"t", request.sample.t},
                                {"noise_id", request.sample.noise_id}};
  if (request.image.payload) msg["payload_b64"] = base64_encode(*request.image.payload);
  transport_->write_line(msg.dump());

  const std::string line = transport_->read_line();
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw ProtocolError("malformed scorer response '" + line + "'");
  }
  if (!reply.is_object() || !reply.contains("id") || !reply["id"].is_number_integer()) {
    throw ProtocolError("scorer response without an integer id: '" + line + "'");
  }
  if (reply["id"].get<std::int64_t>() != id) {
    throw ProtocolError("scorer answered id " + reply["id"].dump() + " to request " +
                        std::to_string(id));
  }
  if (reply.contains("fault")) {
    throw ScorerError("scorer fault: " +
                      (reply["fault"].is_string() ? reply["fault"].get<std::string>()
                                                  : reply["fault"].dump()));
  }
  if (!reply.contains("error") || !reply["error"].is_number()) {
    throw ProtocolError("scorer response has neither error nor fault: '" + line + "'");
  }
  const double value = reply["error"].get<double>();
  if (!std::isfinite(value) || value < 0.0) {
    throw ProtocolError("scorer returned invalid error " + reply["error"].dump());
  }
  return value;
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (const std::size_t rest = bytes.size() - i; rest > 0) {
    std::uint32_t v = bytes[i] << 16;
    if (rest == 2) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

}  // namespace hdc
