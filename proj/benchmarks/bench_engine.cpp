#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "hydra/engine.hpp"
#include "hydra/oracles.hpp"
#include "hydra/pareto.hpp"
#include "hydra/similarity.hpp"

namespace {

using namespace hydra;

struct Problem {
  TokenSequence tokens;
  CandidateSets sets;
  LexiconClassifier oracle;
};

// n positions, k candidates each; the label flips after roughly n/4 substitutions.
Problem make_problem(std::size_t n, std::size_t k) {
  std::vector<std::string> tokens;
  std::vector<std::vector<std::string>> cands(n);
  std::unordered_map<std::string, double> weights;
  for (std::size_t i = 0; i < n; ++i) {
    tokens.push_back("w" + std::to_string(i));
    weights[tokens.back()] = 1.0;
    for (std::size_t c = 0; c < k; ++c) {
      const std::string word = "s" + std::to_string(i) + "_" + std::to_string(c);
      cands[i].push_back(word);
      weights[word] = -1.0 + 0.1 * static_cast<double>(c);
    }
  }
  TokenSequence x(tokens);
  weights["w0"] = -static_cast<double>(n) / 2.0;
  CandidateSets sets(x, cands);
  return {x, std::move(sets), LexiconClassifier(weights)};
}

void BM_PopulationInsert(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> card(0, n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ScoredSolution> offspring;
  for (int i = 0; i < 4096; ++i) {
    const int c = card(rng);
    std::vector<Choice> choices;
    for (int p = 0; p < c; ++p) choices.push_back({static_cast<std::uint32_t>(p), 0});
    offspring.push_back({Solution::from_choices(choices),
                         ObjectiveVector::make(F1Value::real(0.5 * unit(rng) + 0.01 * c), -c, unit(rng))});
  }
  for (auto _ : state) {
    Population pop;
    for (const auto& o : offspring) pop.insert(o);
    benchmark::DoNotOptimize(pop.size());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(offspring.size()));
}
BENCHMARK(BM_PopulationInsert)->Arg(16)->Arg(64)->Arg(256);

void BM_SampleVariation(benchmark::State& state) {
  const auto p = make_problem(static_cast<std::size_t>(state.range(0)), 8);
  std::vector<Choice> half;
  for (std::uint32_t i = 0; i < p.tokens.size(); i += 2) half.push_back({i, 0});
  const Solution s = Solution::from_choices(half);
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_variation(s, p.sets, rng));
}
BENCHMARK(BM_SampleVariation)->Arg(20)->Arg(100);

void BM_RunAttack(benchmark::State& state) {
  auto p = make_problem(static_cast<std::size_t>(state.range(0)), 4);
  const TokenOverlapSimilarity sim;
  EngineConfig cfg;
  std::uint64_t seed = 0;
  std::size_t queries = 0;
  for (auto _ : state) {
    cfg.rng_seed = seed++;
    const auto r = run_attack(p.tokens, p.sets, AttackGoal::untargeted(1), p.oracle, sim, cfg);
    queries += r.oracle_queries;
    benchmark::DoNotOptimize(r.success);
  }
  state.counters["queries/run"] =
      benchmark::Counter(static_cast<double>(queries) / static_cast<double>(state.iterations()));
}
BENCHMARK(BM_RunAttack)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
