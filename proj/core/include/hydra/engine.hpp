#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "hydra/objectives.hpp"
#include "hydra/pareto.hpp"
#include "hydra/search_space.hpp"

namespace hydra {

struct EngineConfig {
  std::size_t max_generations = 2000;
  std::size_t max_queries = 6000;
  std::uint64_t rng_seed = 0;
  QueryMode mode = QueryMode::Score;
  bool record_trajectory = false;

  void validate() const;
};

/// Cache of evaluated solutions. Only misses reach the victim model.
class QueryArchive {
 public:
  /// Counts a cache hit when found.
  const ObjectiveVector* lookup(const Solution& s);
  const ObjectiveVector* peek(const Solution& s) const;
  void store(const Solution& s, const ObjectiveVector& v);

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t oracle_queries() const noexcept { return oracle_queries_; }
  std::size_t cache_hits() const noexcept { return cache_hits_; }
  bool contains(const Solution& s) const { return entries_.contains(s); }

 private:
  std::unordered_map<Solution, ObjectiveVector, SolutionHash> entries_;
  std::size_t oracle_queries_ = 0;
  std::size_t cache_hits_ = 0;
};

/// Tracks which one-step neighbors of the current best solution have been
/// seen since it last changed.
class VisitedNeighborhood {
 public:
  VisitedNeighborhood(Solution anchor, const CandidateSets& sets);

  const Solution& anchor() const noexcept { return anchor_; }
  /// Restarts the count from zero around a new anchor.
  void reset(Solution anchor, const CandidateSets& sets);
  /// Marks `s` if it is a neighbor of the anchor.
  void observe(const Solution& s);

  std::size_t visited() const noexcept { return visited_.size(); }
  std::size_t total() const noexcept { return total_; }
  bool exhausted() const noexcept { return visited_.size() == total_; }

 private:
  Solution anchor_;
  std::unordered_set<Solution, SolutionHash> visited_;
  std::size_t total_ = 0;
};

enum class Termination { BudgetExhausted, GenerationCap, NeighborhoodExhausted };

std::string_view to_string(Termination t) noexcept;

struct TrajectoryRow {
  std::size_t generation = 0;
  std::size_t pop_size = 0;
  ObjectiveVector best;
  std::size_t queries = 0;
};

struct AttackResult {
  bool success = false;
  ScoredSolution best;
  TokenSequence adversarial;
  std::size_t oracle_queries = 0;
  std::size_t cache_hits = 0;
  std::size_t generations = 0;
  Termination termination = Termination::GenerationCap;
  std::vector<TrajectoryRow> trajectory;
  /// Final population, kept for diagnostics and invariant checks.
  Population population;

  nlohmann::json to_json(const CandidateSets& sets, QueryMode mode) const;
  std::string trajectory_csv() const;
};

/// Runs the evolutionary attack from the empty solution. The initial check
/// that the oracle classifies `x` as `goal.original_label` costs one query and
/// counts against `config.max_queries`.
AttackResult run_attack(const TokenSequence& x, const CandidateSets& sets, const AttackGoal& goal,
                        VictimOracle& oracle, const SimilarityProvider& sim, const EngineConfig& config);

struct ExhaustiveResult {
  std::size_t search_space = 0;
  /// Exact non-weakly-dominated set (full ties resolved to the first solution
  /// in enumeration order), ascending cardinality.
  std::vector<ScoredSolution> front;
  /// Successful solution with minimal cardinality, ties broken by f3.
  std::optional<ScoredSolution> minimal_success;
  std::vector<ScoredSolution> all;  // every feasible solution, enumeration order

  nlohmann::json to_json(const CandidateSets& sets) const;
};

inline constexpr double kMaxExhaustiveSpace = 1e6;

/// Evaluates every feasible subset. Throws SearchSpaceTooLarge beyond 10^6.
ExhaustiveResult exhaustive_reference(const TokenSequence& x, const CandidateSets& sets, const AttackGoal& goal,
                                      VictimOracle& oracle, const SimilarityProvider& sim,
                                      std::optional<QueryMode> mode = std::nullopt);

}  // namespace hydra
