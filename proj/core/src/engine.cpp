#include "hydra/engine.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "hydra/error.hpp"

namespace hydra {

void EngineConfig::validate() const {
  if (max_generations < 1) throw Error(ErrorCode::InvalidConfig, "max_generations must be at least 1");
  if (max_queries < 1) throw Error(ErrorCode::InvalidConfig, "max_queries must be at least 1");
}

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::BudgetExhausted: return "BudgetExhausted";
    case Termination::GenerationCap: return "GenerationCap";
    case Termination::NeighborhoodExhausted: return "NeighborhoodExhausted";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------

const ObjectiveVector* QueryArchive::lookup(const Solution& s) {
  auto it = entries_.find(s);
  if (it == entries_.end()) return nullptr;
  ++cache_hits_;
  return &it->second;
}

const ObjectiveVector* QueryArchive::peek(const Solution& s) const {
  auto it = entries_.find(s);
  return it == entries_.end() ? nullptr : &it->second;
}

void QueryArchive::store(const Solution& s, const ObjectiveVector& v) {
  if (entries_.emplace(s, v).second) ++oracle_queries_;
}

VisitedNeighborhood::VisitedNeighborhood(Solution anchor, const CandidateSets& sets) {
  reset(std::move(anchor), sets);
}

void VisitedNeighborhood::reset(Solution anchor, const CandidateSets& sets) {
  total_ = neighborhood_size(anchor, sets);
  anchor_ = std::move(anchor);
  visited_.clear();
}

void VisitedNeighborhood::observe(const Solution& s) {
  if (is_neighbor(anchor_, s)) visited_.insert(s);
}

// ---------------------------------------------------------------------------

namespace {

struct Evaluated {
  ObjectiveVector objectives;
  int label = 0;
};

class Evaluator {
 public:
  Evaluator(const TokenSequence& x, const CandidateSets& sets, const AttackGoal& goal, VictimOracle& oracle,
            const SimilarityProvider& sim, QueryMode mode)
      : x_(x), sets_(sets), goal_(goal), oracle_(oracle), sim_(sim), mode_(mode) {}

  std::vector<Evaluated> operator()(std::span<const Solution> batch) {
    std::vector<TokenSequence> texts;
    texts.reserve(batch.size());
    for (const auto& s : batch) texts.push_back(apply_solution(x_, sets_, s));
    std::vector<Verdict> verdicts = oracle_.classify(texts);
    if (verdicts.size() != batch.size()) {
      throw Error(ErrorCode::ProtocolViolation, fmt::format("oracle answered {} of {} texts", verdicts.size(),
                                                            batch.size()));
    }
    std::vector<Evaluated> out;
    out.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      // A decision-based attacker never sees probabilities, even if the
      // oracle hands them out.
      if (mode_ == QueryMode::Decision) verdicts[i].probabilities.reset();
      out.push_back({score_verdict(x_, texts[i], batch[i].cardinality(), goal_, mode_, verdicts[i], sim_),
                     verdicts[i].label});
    }
    return out;
  }

 private:
  const TokenSequence& x_;
  const CandidateSets& sets_;
  const AttackGoal& goal_;
  VictimOracle& oracle_;
  const SimilarityProvider& sim_;
  QueryMode mode_;
};

void check_inputs(const TokenSequence& x, const CandidateSets& sets, const AttackGoal& goal,
                  const VictimOracle& oracle, QueryMode mode) {
  if (sets.size() != x.size()) {
    throw Error(ErrorCode::InvalidInstance, "candidate sets do not match the input length");
  }
  goal.validate(oracle.num_classes());
  if (mode == QueryMode::Score && oracle.mode() == QueryMode::Decision) {
    throw Error(ErrorCode::InvalidConfig, "score-based attack against a decision-only oracle");
  }
}

}  // namespace

AttackResult run_attack(const TokenSequence& x, const CandidateSets& sets, const AttackGoal& goal,
                        VictimOracle& oracle, const SimilarityProvider& sim, const EngineConfig& config) {
  config.validate();
  check_inputs(x, sets, goal, oracle, config.mode);

  Evaluator evaluate(x, sets, goal, oracle, sim, config.mode);
  QueryArchive archive;
  Rng rng(config.rng_seed);

  const Solution empty;
  {
    const Solution batch[] = {empty};
    const Evaluated initial = evaluate(batch).front();
    if (initial.label != goal.original_label) {
      throw Error(ErrorCode::OriginalMisclassified,
                  fmt::format("oracle predicts {} for the original input, expected {}", initial.label,
                              goal.original_label));
    }
    archive.store(empty, initial.objectives);
  }

  AttackResult result;
  Population& pop = result.population;
  pop = Population({empty, *archive.peek(empty)});
  VisitedNeighborhood neighborhood(empty, sets);

  std::size_t t = 0;
  result.termination = Termination::GenerationCap;
  std::vector<Solution> misses;
  while (t < config.max_generations) {
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    const Solution parent = pop.at(pick(rng)).solution;
    const std::vector<Solution> offspring = sample_variation(parent, sets, rng);

    // Offspring past the first one the budget cannot pay for are dropped.
    const std::size_t remaining = config.max_queries - archive.oracle_queries();
    std::size_t cut = offspring.size();
    misses.clear();
    for (std::size_t i = 0; i < offspring.size(); ++i) {
      if (archive.contains(offspring[i])) continue;
      if (misses.size() == remaining) {
        cut = i;
        break;
      }
      misses.push_back(offspring[i]);
    }
    const bool budget_hit = cut < offspring.size();

    if (!misses.empty()) {
      const std::vector<Evaluated> fresh = evaluate(misses);
      for (std::size_t i = 0; i < misses.size(); ++i) archive.store(misses[i], fresh[i].objectives);
    }
    for (std::size_t i = 0; i < cut; ++i) {
      const Solution& child = offspring[i];
      const bool was_miss = std::find(misses.begin(), misses.end(), child) != misses.end();
      const ObjectiveVector objectives = was_miss ? *archive.peek(child) : *archive.lookup(child);
      neighborhood.observe(child);
      pop.insert({child, objectives});
    }

    const ScoredSolution& best = pop.best();
    if (best.solution != neighborhood.anchor()) neighborhood.reset(best.solution, sets);

    if (config.record_trajectory) {
      result.trajectory.push_back({t + 1, pop.size(), best.objectives, archive.oracle_queries()});
    }
    if (neighborhood.exhausted()) {
      result.termination = Termination::NeighborhoodExhausted;
      break;
    }
    if (budget_hit) {
      result.termination = Termination::BudgetExhausted;
      break;
    }
    ++t;
  }

  result.best = pop.best();
  result.success = result.best.objectives.success;
  result.adversarial = apply_solution(x, sets, result.best.solution);
  result.oracle_queries = archive.oracle_queries();
  result.cache_hits = archive.cache_hits();
  result.generations = t;
  return result;
}

nlohmann::json AttackResult::to_json(const CandidateSets& sets, QueryMode mode) const {
  nlohmann::json j;
  j["outcome"] = success ? "Success" : "Failure";
  j["termination"] = std::string(hydra::to_string(termination));
  j["generations"] = generations;
  j["oracle_queries"] = oracle_queries;
  j["cache_hits"] = cache_hits;
  j["cardinality"] = best.solution.cardinality();
  j["objectives"] = hydra::to_json(best.objectives);
  if (!best.objectives.success) j["objectives"]["f1_numeric"] = best.objectives.f1.numeric(mode);
  j["choices"] = choices_to_json(best.solution, sets);
  j["adversarial"] = adversarial.join();
  j["modification_rate"] = adversarial.empty() ? 0.0 : modification_rate(best.solution, adversarial.size());
  j["population"] = population.to_json(sets);
  return j;
}

std::string AttackResult::trajectory_csv() const {
  std::string out = "generation,pop_size,f1,f2,f3,queries\n";
  for (const auto& row : trajectory) {
    const std::string f1 = row.best.f1.is_success() ? "success" : fmt::format("{}", row.best.f1.value());
    out += fmt::format("{},{},{},{},{},{}\n", row.generation, row.pop_size, f1, row.best.f2, row.best.f3,
                       row.queries);
  }
  return out;
}

// ---------------------------------------------------------------------------

ExhaustiveResult exhaustive_reference(const TokenSequence& x, const CandidateSets& sets, const AttackGoal& goal,
                                      VictimOracle& oracle, const SimilarityProvider& sim,
                                      std::optional<QueryMode> mode) {
  const QueryMode m = mode.value_or(oracle.mode());
  check_inputs(x, sets, goal, oracle, m);
  const double space = sets.search_space_size();
  if (space > kMaxExhaustiveSpace) {
    throw Error(ErrorCode::SearchSpaceTooLarge, fmt::format("search space {} exceeds {}", space,
                                                            kMaxExhaustiveSpace));
  }

  ExhaustiveResult result;
  result.search_space = static_cast<std::size_t>(space);
  result.all.reserve(result.search_space);

  // Mixed-radix counter: digit i is 0 (original word) or 1 + candidate index.
  const std::size_t n = sets.size();
  std::vector<std::uint32_t> digits(n, 0);
  std::vector<Solution> batch;
  Evaluator evaluate(x, sets, goal, oracle, sim, m);
  auto flush = [&] {
    const auto scored = evaluate(batch);
    for (std::size_t i = 0; i < batch.size(); ++i) result.all.push_back({batch[i], scored[i].objectives});
    batch.clear();
  };
  for (std::size_t k = 0; k < result.search_space; ++k) {
    std::vector<Choice> choices;
    for (std::size_t i = 0; i < n; ++i) {
      if (digits[i]) choices.push_back({static_cast<std::uint32_t>(i), digits[i] - 1});
    }
    batch.push_back(Solution::from_choices(std::move(choices)));
    if (batch.size() == 512) flush();
    for (std::size_t i = 0; i < n; ++i) {
      if (++digits[i] <= sets.count(i)) break;
      digits[i] = 0;
    }
  }
  if (!batch.empty()) flush();

  // Best per cardinality (f1, then f3, then first seen), then keep those
  // whose f1 beats every smaller cardinality.
  std::vector<const ScoredSolution*> per_card(n + 1, nullptr);
  for (const auto& s : result.all) {
    auto& slot = per_card[s.solution.cardinality()];
    if (!slot || dominates(s.objectives, slot->objectives)) slot = &s;
  }
  const ScoredSolution* running = nullptr;
  for (const auto* s : per_card) {
    if (!s) continue;
    if (!running || s->objectives.f1 > running->objectives.f1) {
      result.front.push_back(*s);
      running = s;
    }
  }

  for (const auto& s : result.all) {
    if (!s.objectives.success) continue;
    const auto& cur = result.minimal_success;
    if (!cur || s.solution.cardinality() < cur->solution.cardinality() ||
        (s.solution.cardinality() == cur->solution.cardinality() && s.objectives.f3 > cur->objectives.f3)) {
      result.minimal_success = s;
    }
  }
  return result;
}

nlohmann::json ExhaustiveResult::to_json(const CandidateSets& sets) const {
  nlohmann::json j;
  j["search_space"] = search_space;
  auto front_json = nlohmann::json::array();
  for (const auto& s : front) {
    front_json.push_back({{"cardinality", s.solution.cardinality()},
                          {"objectives", hydra::to_json(s.objectives)},
                          {"choices", choices_to_json(s.solution, sets)}});
  }
  j["front"] = std::move(front_json);
  if (minimal_success) {
    j["minimal_success"] = {{"cardinality", minimal_success->solution.cardinality()},
                            {"objectives", hydra::to_json(minimal_success->objectives)},
                            {"choices", choices_to_json(minimal_success->solution, sets)}};
  } else {
    j["minimal_success"] = nullptr;
  }
  return j;
}

}  // namespace hydra
