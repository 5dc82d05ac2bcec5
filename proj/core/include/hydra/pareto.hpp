#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hydra/objectives.hpp"
#include "hydra/search_space.hpp"

namespace hydra {

/// a ⪯ b: no worse on f1 and f2. f3 plays no part.
bool weakly_dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept;

/// a ≺ b: weakly dominates with a strict gain on f1 or f2, or ties on both
/// and is strictly more similar (f3). Exact floating comparison throughout.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept;

struct ScoredSolution {
  Solution solution;
  ObjectiveVector objectives;
};

/// Non-weakly-dominated archive. Two members can never share f2, so entries
/// are keyed by cardinality (-f2); iteration runs from the smallest
/// cardinality (highest f2, lowest f1) to the largest.
class Population {
 public:
  Population() = default;
  explicit Population(ScoredSolution initial);

  /// Inserts `o` unless some member dominates it, evicting every member `o`
  /// weakly dominates. A full tie replaces the incumbent. Returns whether
  /// `o` was accepted.
  bool insert(ScoredSolution o);

  /// Entry with maximal f1 (equivalently minimal f2). Throws EmptyPopulation.
  const ScoredSolution& best() const;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  /// Uniform access for parent selection; index 0 is the smallest cardinality.
  const ScoredSolution& at(std::size_t index) const;
  const std::map<int, ScoredSolution>& entries() const noexcept { return entries_; }

  /// Structural guarantees that follow from non-weak-domination: one entry per
  /// f2 value, at most `n + 1` entries, strictly ascending f1 along
  /// descending f2, and at most one successful entry which is the best. An
  /// empty result means all hold.
  std::vector<std::string> check_invariants(std::size_t n) const;

  nlohmann::json to_json(const CandidateSets& sets) const;

 private:
  std::map<int, ScoredSolution> entries_;
};

}  // namespace hydra
