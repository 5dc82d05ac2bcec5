#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "hydra/objectives.hpp"

namespace hydra {

/// Binary bag-of-words logistic model: P(class 1) = logistic(Σ weight(w)),
/// unknown words weigh 0, and a 0.5 tie goes to class 0.
class LexiconClassifier final : public VictimOracle {
 public:
  explicit LexiconClassifier(std::unordered_map<std::string, double> weights,
                             QueryMode mode = QueryMode::Score);

  static LexiconClassifier from_json(const nlohmann::json& j, QueryMode mode = QueryMode::Score);
  static LexiconClassifier load(const std::string& path, QueryMode mode = QueryMode::Score);

  QueryMode mode() const override { return mode_; }
  int num_classes() const override { return 2; }
  std::vector<Verdict> classify(std::span<const TokenSequence> texts) override;

  double score(const TokenSequence& text) const;
  /// Label and both class probabilities, regardless of mode.
  Verdict lexicon_classify(const TokenSequence& text) const;

  const std::unordered_map<std::string, double>& weights() const noexcept { return weights_; }

 private:
  std::unordered_map<std::string, double> weights_;
  QueryMode mode_;
};

double logistic(double s) noexcept;

struct RemoteEndpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  std::chrono::milliseconds timeout{5000};
};

/// Client for the newline-delimited JSON model-server protocol. One instance
/// is one TCP session and must not be shared between threads.
class RemoteOracle final : public VictimOracle {
 public:
  /// Connects and reads the handshake. A score-mode client refuses a
  /// decision-only server; a decision-mode client accepts either and drops
  /// any probabilities it receives.
  RemoteOracle(RemoteEndpoint endpoint, QueryMode mode);
  ~RemoteOracle() override;

  RemoteOracle(const RemoteOracle&) = delete;
  RemoteOracle& operator=(const RemoteOracle&) = delete;

  QueryMode mode() const override { return mode_; }
  int num_classes() const override { return num_classes_; }
  QueryMode server_mode() const noexcept { return server_mode_; }
  std::vector<Verdict> classify(std::span<const TokenSequence> texts) override;

  std::uint64_t requests_sent() const noexcept { return next_id_; }

 private:
  void send_line(const std::string& line);
  std::string read_line();

  RemoteEndpoint endpoint_;
  QueryMode mode_;
  QueryMode server_mode_ = QueryMode::Score;
  int num_classes_ = 0;
  int fd_ = -1;
  std::uint64_t next_id_ = 0;
  std::string buffer_;
};

/// Parses and validates one reply line against the request it answers.
std::vector<Verdict> decode_reply(const std::string& line, std::uint64_t expected_id, std::size_t expected_count,
                                  int num_classes, QueryMode client_mode);
std::string encode_request(std::uint64_t id, std::span<const TokenSequence> texts);

}  // namespace hydra
