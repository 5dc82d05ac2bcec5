#include <netdb.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <string>

#include "hydra/error.hpp"
#include "hydra/oracles.hpp"

namespace hydra {

namespace {

[[noreturn]] void transport(const std::string& what) { throw Error(ErrorCode::OracleTransport, what); }
[[noreturn]] void violation(const std::string& what) { throw Error(ErrorCode::ProtocolViolation, what); }

int connect_to(const RemoteEndpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string port = std::to_string(ep.port);
  if (int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &found); rc != 0) {
    transport("cannot resolve " + ep.host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* a = found; a; a = a->ai_next) {
    fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) transport("cannot connect to " + ep.host + ":" + port);

  timeval tv{};
  tv.tv_sec = static_cast<time_t>(ep.timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((ep.timeout.count() % 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
  return fd;
}

nlohmann::json parse_line(const std::string& line) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    transport(std::string("malformed reply: ") + e.what());
  }
}

}  // namespace

std::string encode_request(std::uint64_t id, std::span<const TokenSequence> texts) {
  nlohmann::json texts_json = nlohmann::json::array();
  for (const auto& t : texts) texts_json.push_back(t.tokens());
  nlohmann::json req = {{"id", id}, {"texts", std::move(texts_json)}};
  return req.dump();
}

std::vector<Verdict> decode_reply(const std::string& line, std::uint64_t expected_id, std::size_t expected_count,
                                  int num_classes, QueryMode client_mode) {
  const nlohmann::json reply = parse_line(line);
  if (!reply.is_object()) transport("reply is not a JSON object");
  if (reply.contains("error")) {
    transport("server error: " + (reply["error"].is_string() ? reply["error"].get<std::string>()
                                                              : reply["error"].dump()));
  }
  if (!reply.contains("id") || !reply["id"].is_number_unsigned() ||
      reply["id"].get<std::uint64_t>() != expected_id) {
    transport("reply id does not match request " + std::to_string(expected_id));
  }
  if (!reply.contains("labels") || !reply["labels"].is_array()) transport("reply has no labels");
  const auto& labels = reply["labels"];
  if (labels.size() != expected_count) {
    violation("reply carries " + std::to_string(labels.size()) + " labels for " + std::to_string(expected_count) +
              " texts");
  }

  const bool want_probs = client_mode == QueryMode::Score;
  const nlohmann::json* probs = nullptr;
  if (want_probs) {
    if (!reply.contains("probs") || !reply["probs"].is_array()) violation("score reply without probs");
    probs = &reply["probs"];
    if (probs->size() != expected_count) violation("probs count does not match texts");
  }

  std::vector<Verdict> out(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    if (!labels[i].is_number_integer()) violation("non-integer label");
    const int label = labels[i].get<int>();
    if (label < 0 || label >= num_classes) violation("label " + std::to_string(label) + " out of range");
    out[i].label = label;
    if (!want_probs) continue;
    const auto& row = (*probs)[i];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(num_classes)) {
      violation("probability vector of wrong length at index " + std::to_string(i));
    }
    std::vector<double> p;
    p.reserve(row.size());
    double sum = 0.0;
    for (const auto& v : row) {
      if (!v.is_number()) violation("non-numeric probability");
      const double x = v.get<double>();
      if (x < 0.0) violation("negative probability");
      sum += x;
      p.push_back(x);
    }
    if (std::abs(sum - 1.0) > 1e-6) violation("probabilities do not sum to 1");
    out[i].probabilities = std::move(p);
  }
  return out;
}

RemoteOracle::RemoteOracle(RemoteEndpoint endpoint, QueryMode mode) : endpoint_(std::move(endpoint)), mode_(mode) {
  fd_ = connect_to(endpoint_);
  try {
    const nlohmann::json hello = parse_line(read_line());
    if (!hello.is_object() || !hello.contains("mode") || !hello.contains("num_classes") ||
        !hello["mode"].is_string() || !hello["num_classes"].is_number_unsigned()) {
      violation("bad handshake");
    }
    const std::string m = hello["mode"].get<std::string>();
    if (m == "score") {
      server_mode_ = QueryMode::Score;
    } else if (m == "decision") {
      server_mode_ = QueryMode::Decision;
    } else {
      violation("unknown server mode '" + m + "'");
    }
    num_classes_ = hello["num_classes"].get<int>();
    if (num_classes_ < 2) violation("server reports fewer than 2 classes");
    if (mode_ == QueryMode::Score && server_mode_ == QueryMode::Decision) {
      violation("score-mode client connected to a decision-only server");
    }
  } catch (...) {
    ::close(fd_);
    fd_ = -1;
    throw;
  }
}

RemoteOracle::~RemoteOracle() {
  if (fd_ >= 0) ::close(fd_);
}

void RemoteOracle::send_line(const std::string& line) {
  std::string payload = line;
  payload.push_back('\n');
  std::size_t sent = 0;
  while (sent < payload.size()) {
    const ssize_t n = ::send(fd_, payload.data() + sent, payload.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      transport(std::string("send failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::string RemoteOracle::read_line() {
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n == 0) transport("server closed the connection");
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) transport("timed out waiting for the server");
      transport(std::string("recv failed: ") + std::strerror(errno));
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<Verdict> RemoteOracle::classify(std::span<const TokenSequence> texts) {
  if (texts.empty()) return {};
  const std::uint64_t id = ++next_id_;
  send_line(encode_request(id, texts));
  return decode_reply(read_line(), id, texts.size(), num_classes_, mode_);
}

}  // namespace hydra
