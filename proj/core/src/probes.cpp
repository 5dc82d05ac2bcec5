#include "hydra/probes.hpp"

#include <bit>
#include <string>

#include "hydra/error.hpp"

namespace hydra {

namespace {

std::vector<std::optional<double>> tabulate(const SetFunction& f, std::size_t ground_size) {
  if (ground_size > kMaxProbeGroundSize) {
    throw Error(ErrorCode::GroundSetTooLarge, "ground set of " + std::to_string(ground_size) +
                                                  " elements exceeds " + std::to_string(kMaxProbeGroundSize));
  }
  const std::uint64_t count = std::uint64_t{1} << ground_size;
  std::vector<std::optional<double>> table(count);
  for (std::uint64_t m = 0; m < count; ++m) table[m] = f(m);
  return table;
}

}  // namespace

ProbeReport<MonotonicityViolation> probe_monotonicity(const SetFunction& f, std::size_t ground_size,
                                                      const ProbeOptions& options) {
  const auto table = tabulate(f, ground_size);
  ProbeReport<MonotonicityViolation> report;
  for (std::uint64_t y = 0; y < table.size(); ++y) {
    if (!table[y]) continue;
    // Proper submasks of y, including the empty set.
    for (std::uint64_t x = (y - 1) & y;; x = (x - 1) & y) {
      if (x != y && table[x]) {
        ++report.checked;
        if (*table[x] > *table[y] + options.tolerance) {
          ++report.violations;
          if (report.witnesses.size() < options.max_witnesses) {
            report.witnesses.push_back({x, y, *table[x], *table[y]});
          }
        }
      }
      if (x == 0) break;
    }
  }
  return report;
}

ProbeReport<SubmodularityViolation> probe_submodularity(const SetFunction& f, std::size_t ground_size,
                                                        const ProbeOptions& options) {
  const auto table = tabulate(f, ground_size);
  ProbeReport<SubmodularityViolation> report;
  for (std::uint64_t s2 = 0; s2 < table.size(); ++s2) {
    if (!table[s2]) continue;
    for (std::uint32_t e = 0; e < ground_size; ++e) {
      const std::uint64_t bit = std::uint64_t{1} << e;
      if ((s2 & bit) || !table[s2 | bit]) continue;
      const double gain_larger = *table[s2 | bit] - *table[s2];
      for (std::uint64_t s1 = s2;; s1 = (s1 - 1) & s2) {
        if (table[s1] && table[s1 | bit]) {
          ++report.checked;
          const double gain_smaller = *table[s1 | bit] - *table[s1];
          if (gain_smaller < gain_larger - options.tolerance) {
            ++report.violations;
            if (report.witnesses.size() < options.max_witnesses) {
              report.witnesses.push_back({s1, s2, e, gain_smaller, gain_larger});
            }
          }
        }
        if (s1 == 0) break;
      }
    }
  }
  return report;
}

SetFunction TabulatedSetFunction::function() const {
  return [values = values](std::uint64_t mask) -> std::optional<double> {
    return mask < values.size() ? values[mask] : std::nullopt;
  };
}

TabulatedSetFunction tabulate_f1(const TokenSequence& x, const CandidateSets& sets, const AttackGoal& goal,
                                 VictimOracle& oracle, QueryMode mode) {
  TabulatedSetFunction out;
  for (std::uint32_t i = 0; i < sets.size(); ++i) {
    for (std::uint32_t c = 0; c < sets.count(i); ++c) out.items.push_back({i, c});
  }
  if (out.items.size() > kMaxProbeGroundSize) {
    throw Error(ErrorCode::GroundSetTooLarge, "instance has " + std::to_string(out.items.size()) +
                                                  " candidate items, more than " +
                                                  std::to_string(kMaxProbeGroundSize));
  }
  if (sets.size() != x.size()) throw Error(ErrorCode::InvalidInstance, "candidate sets do not match input");
  goal.validate(oracle.num_classes());

  const std::uint64_t count = std::uint64_t{1} << out.items.size();
  out.values.assign(count, std::nullopt);
  std::vector<std::uint64_t> masks;
  std::vector<Solution> solutions;
  std::vector<TokenSequence> texts;
  for (std::uint64_t m = 0; m < count; ++m) {
    // Items are sorted by position, so a repeated position shows up as two
    // consecutive set bits mapping to the same position.
    std::vector<Choice> choices;
    bool feasible = true;
    for (std::uint64_t rest = m; rest; rest &= rest - 1) {
      const Choice& item = out.items[std::countr_zero(rest)];
      if (!choices.empty() && choices.back().position == item.position) {
        feasible = false;
        break;
      }
      choices.push_back(item);
    }
    if (!feasible) continue;
    masks.push_back(m);
    solutions.push_back(Solution::from_choices(std::move(choices)));
    texts.push_back(apply_solution(x, sets, solutions.back()));
  }
  auto verdicts = oracle.classify(texts);
  if (verdicts.size() != texts.size()) throw Error(ErrorCode::ProtocolViolation, "oracle dropped texts");
  for (std::size_t k = 0; k < masks.size(); ++k) {
    if (mode == QueryMode::Decision) verdicts[k].probabilities.reset();
    out.values[masks[k]] = eval_f1(goal, mode, verdicts[k], solutions[k].cardinality()).numeric(mode);
  }
  return out;
}

}  // namespace hydra
