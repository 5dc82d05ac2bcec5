#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hydra/objectives.hpp"
#include "hydra/search_space.hpp"

namespace hydra {

/// A set function over a ground set of at most 12 elements, subsets encoded as
/// bitmasks. `nullopt` marks a subset outside the function's domain (e.g. two
/// substitutes for the same position); pairs touching it are not checked.
using SetFunction = std::function<std::optional<double>(std::uint64_t)>;

inline constexpr std::size_t kMaxProbeGroundSize = 12;

struct ProbeOptions {
  double tolerance = 1e-9;
  std::size_t max_witnesses = 1024;
};

struct MonotonicityViolation {
  std::uint64_t subset = 0;    // X
  std::uint64_t superset = 0;  // Y, X ⊆ Y
  double f_subset = 0.0;
  double f_superset = 0.0;
};

struct SubmodularityViolation {
  std::uint64_t smaller = 0;  // S1
  std::uint64_t larger = 0;   // S2, S1 ⊆ S2
  std::uint32_t element = 0;  // e ∉ S2
  double gain_smaller = 0.0;
  double gain_larger = 0.0;
};

template <typename Witness>
struct ProbeReport {
  std::size_t violations = 0;  // total count found
  std::vector<Witness> witnesses;  // first `max_witnesses` of them
  std::size_t checked = 0;

  bool empty() const noexcept { return violations == 0; }
};

/// Looks for X ⊆ Y with f(X) > f(Y).
ProbeReport<MonotonicityViolation> probe_monotonicity(const SetFunction& f, std::size_t ground_size,
                                                      const ProbeOptions& options = {});

/// Looks for S1 ⊆ S2, e ∉ S2 with f(S1 ∪ {e}) - f(S1) < f(S2 ∪ {e}) - f(S2).
ProbeReport<SubmodularityViolation> probe_submodularity(const SetFunction& f, std::size_t ground_size,
                                                        const ProbeOptions& options = {});

/// f1 of an attack instance as a set function over its (position, candidate)
/// items, in position-then-candidate order. Every feasible subset is queried
/// once up front; infeasible subsets are undefined.
struct TabulatedSetFunction {
  std::vector<Choice> items;
  std::vector<std::optional<double>> values;

  std::size_t ground_size() const noexcept { return items.size(); }
  SetFunction function() const;
};

TabulatedSetFunction tabulate_f1(const TokenSequence& x, const CandidateSets& sets, const AttackGoal& goal,
                                 VictimOracle& oracle, QueryMode mode);

}  // namespace hydra
