#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace hydra {

using Rng = std::mt19937_64;

/// The original input as an ordered list of words.
class TokenSequence {
 public:
  TokenSequence() = default;
  explicit TokenSequence(std::vector<std::string> tokens);

  /// Splits on ASCII whitespace.
  static TokenSequence parse(std::string_view text);

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  auto begin() const noexcept { return tokens_.begin(); }
  auto end() const noexcept { return tokens_.end(); }

  std::string join() const;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;

 private:
  std::vector<std::string> tokens_;
};

/// Per-position candidate substitute lists. Candidates are addressed by
/// (position, index), so lists at different positions never alias even when
/// they share spellings.
class CandidateSets {
 public:
  CandidateSets() = default;

  /// Validates against `original`: one list per token, no candidate equal to
  /// the original word, no duplicates within a position.
  CandidateSets(const TokenSequence& original, std::vector<std::vector<std::string>> per_position);

  std::size_t size() const noexcept { return per_position_.size(); }
  std::size_t count(std::size_t position) const { return per_position_.at(position).size(); }
  const std::string& word(std::size_t position, std::uint32_t candidate) const {
    return per_position_.at(position).at(candidate);
  }
  std::optional<std::uint32_t> find(std::size_t position, std::string_view word) const;
  const std::vector<std::vector<std::string>>& lists() const noexcept { return per_position_; }

  /// Total number of (position, candidate) items, |V|.
  std::size_t item_count() const noexcept;
  /// Π (|B_i| + 1) as a double so it cannot overflow.
  double search_space_size() const noexcept;

 private:
  std::vector<std::vector<std::string>> per_position_;
};

struct Choice {
  std::uint32_t position = 0;
  std::uint32_t candidate = 0;

  friend auto operator<=>(const Choice&, const Choice&) = default;
};

/// A feasible subset S: at most one chosen candidate per position. Choices are
/// kept sorted by position so equality and hashing are canonical.
class Solution {
 public:
  Solution() = default;

  /// Builds from arbitrary choices; throws InfeasibleSolution on a repeated
  /// position.
  static Solution from_choices(std::vector<Choice> choices);
  /// Builds from (position, word) pairs, checking membership in `sets`.
  static Solution from_words(const CandidateSets& sets,
                             std::span<const std::pair<std::size_t, std::string>> words);

  std::size_t cardinality() const noexcept { return choices_.size(); }
  bool empty() const noexcept { return choices_.empty(); }
  std::span<const Choice> choices() const noexcept { return choices_; }

  std::optional<std::uint32_t> candidate_at(std::size_t position) const;
  bool is_mapped(std::size_t position) const { return candidate_at(position).has_value(); }

  Solution with(std::uint32_t position, std::uint32_t candidate) const;
  Solution without(std::uint32_t position) const;

  /// Throws InfeasibleSolution unless every choice indexes a real candidate.
  void check_feasible(const CandidateSets& sets) const;
  bool is_feasible(const CandidateSets& sets) const noexcept;

  std::uint64_t hash() const noexcept;

  friend bool operator==(const Solution&, const Solution&) = default;

 private:
  explicit Solution(std::vector<Choice> sorted) : choices_(std::move(sorted)) {}
  std::vector<Choice> choices_;
};

struct SolutionHash {
  std::size_t operator()(const Solution& s) const noexcept { return static_cast<std::size_t>(s.hash()); }
};

/// True when `a` and `b` differ in exactly one position's state.
bool is_neighbor(const Solution& a, const Solution& b) noexcept;

enum class VariationKind { Insertion, Deletion, Exchange };

struct Variation {
  VariationKind kind = VariationKind::Insertion;
  std::uint32_t position = 0;
  std::optional<std::uint32_t> candidate;  // absent for Deletion

  friend bool operator==(const Variation&, const Variation&) = default;
};

/// Applies a single variation, validating that it is legal for `s`.
Solution apply_variation(const Solution& s, const Variation& v, const CandidateSets& sets);

TokenSequence apply_solution(const TokenSequence& original, const CandidateSets& sets, const Solution& s);

double modification_rate(const Solution& s, std::size_t n);

/// One uniformly drawn variation of each kind that has at least one legal
/// move, in the order Insertion, Deletion, Exchange.
std::vector<Variation> sample_variations(const Solution& s, const CandidateSets& sets, Rng& rng);
std::vector<Solution> sample_variation(const Solution& s, const CandidateSets& sets, Rng& rng);

std::size_t neighborhood_size(const Solution& s, const CandidateSets& sets);
std::vector<Solution> enumerate_neighbors(const Solution& s, const CandidateSets& sets);

/// One row of an attack dataset.
struct AttackInstance {
  std::string id;
  TokenSequence tokens;
  int label = 0;
  CandidateSets candidates;
};

AttackInstance parse_instance(const nlohmann::json& j, std::string default_id = {});
nlohmann::json to_json(const AttackInstance& instance);
AttackInstance load_instance(const std::string& path);

nlohmann::json choices_to_json(const Solution& s, const CandidateSets& sets);

}  // namespace hydra
