// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "hydra/engine.hpp"
#include "hydra/error.hpp"
#include "hydra/harness.hpp"
#include "hydra/pareto.hpp"
#include "hydra/probes.hpp"
#include "hydra/similarity.hpp"

using namespace hydra;
using namespace hydra::testing;

namespace {

// Tolerances and sizes of every check.
constexpr std::size_t kDominancePairs = 10000;
constexpr double kDominanceSeconds = 1.0;
constexpr std::size_t kArchiveSequences = 1000;
constexpr std::size_t kArchiveMaxLength = 64;
constexpr std::size_t kEngineInstances = 100;
constexpr std::size_t kEngineSeedsPerInstance = 3;
constexpr double kEngineMaxSpace = 10000;
constexpr double kEngineBudgetFactor = 10.0;
constexpr double kEngineMinSuccessRate = 0.95;
constexpr double kEngineCardinalitySlack = 1.0;
constexpr double kEngineSeconds = 60.0;
constexpr std::size_t kAccountingRuns = 200;
constexpr std::size_t kLocalOptimaRuns = 50;
constexpr double kProbeSeconds = 1.0;
constexpr double kModificationCap = 0.25;

struct CheckResult {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

EngineConfig engine_config(std::uint64_t seed, std::size_t generations, QueryMode mode = QueryMode::Score) {
  EngineConfig c;
  c.rng_seed = seed;
  c.max_generations = generations;
  c.max_queries = 3 * generations;
  c.mode = mode;
  return c;
}

// ---------------------------------------------------------------------------

CheckResult dominance_equivalence() {
  std::mt19937_64 rng(101);
  std::size_t agree = 0;
  const auto start = Clock::now();
  for (std::size_t i = 0; i < kDominancePairs; ++i) {
    const auto a = random_vector(rng), b = random_vector(rng);
    const bool ok = weakly_dominates(a, b) == raw_weak(raw(a), raw(b)) && dominates(a, b) == raw_dom(raw(a), raw(b));
    agree += ok;
  }
  const double secs = seconds_since(start);
  return {agree == kDominancePairs && secs < kDominanceSeconds,
          fmt::format("{}/{} pairs agree in {:.3f} s", agree, kDominancePairs, secs)};
}

CheckResult archive_correctness() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> len(1, kArchiveMaxLength);
  std::size_t exact = 0, invariant_failures = 0;
  constexpr int kMaxCard = 8;
  for (std::size_t trial = 0; trial < kArchiveSequences; ++trial) {
    std::vector<ObjectiveVector> seq(len(rng));
    for (auto& v : seq) v = random_vector(rng, kMaxCard);
    Population pop;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      std::vector<Choice> choices;
      for (int k = 0; k < -seq[i].f2; ++k) choices.push_back({static_cast<std::uint32_t>(k), 0});
      pop.insert({Solution::from_choices(choices), seq[i]});
      if (!pop.check_invariants(kMaxCard).empty()) ++invariant_failures;
    }
    // Element i survives iff nothing dominates it and no later copy ties it fully.
    std::multiset<std::tuple<bool, double, int, double>> want, got;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      bool beaten = false;
      for (std::size_t j = 0; j < seq.size() && !beaten; ++j) {
        if (j == i) continue;
        const auto a = raw(seq[j]), b = raw(seq[i]);
        beaten = raw_dom(a, b) || (j > i && raw_f1_eq(a, b) && a.f2 == b.f2 && a.f3 == b.f3);
      }
      if (!beaten) want.insert({seq[i].f1.is_success(), raw(seq[i]).value, seq[i].f2, seq[i].f3});
    }
    for (const auto& [_, e] : pop.entries()) {
      got.insert({e.objectives.f1.is_success(), raw(e.objectives).value, e.objectives.f2, e.objectives.f3});
    }
    exact += want == got;
  }
  return {exact == kArchiveSequences && invariant_failures == 0,
          fmt::format("{}/{} folds exact, {} invariant failures", exact, kArchiveSequences, invariant_failures)};
}

CheckResult engine_vs_exhaustive() {
  std::mt19937_64 rng(303);
  const TokenOverlapSimilarity sim;
  std::size_t instances = 0, trials = 0, successes = 0;
  double card_sum = 0.0, minimal_sum = 0.0;
  const auto start = Clock::now();
  while (instances < kEngineInstances) {
    auto p = random_problem(rng, static_cast<std::size_t>(kEngineMaxSpace));
    const auto& inst = p.instance;
    const AttackGoal goal = AttackGoal::untargeted(inst.label);
    const auto ref = exhaustive_reference(inst.tokens, inst.candidates, goal, p.oracle, sim);
    if (!ref.minimal_success) continue;
    ++instances;
    const double space = static_cast<double>(ref.search_space);
    const auto generations = static_cast<std::size_t>(std::ceil(kEngineBudgetFactor * space / 3.0));
    for (std::size_t s = 0; s < kEngineSeedsPerInstance; ++s) {
      ++trials;
      const auto r = run_attack(inst.tokens, inst.candidates, goal, p.oracle, sim,
                                engine_config(instances * 100 + s, generations));
      if (!r.success) continue;
      ++successes;
      card_sum += static_cast<double>(r.best.solution.cardinality());
      minimal_sum += static_cast<double>(ref.minimal_success->solution.cardinality());
    }
  }
  const double secs = seconds_since(start);
  const double rate = static_cast<double>(successes) / static_cast<double>(trials);
  const double mean_card = successes ? card_sum / successes : 0.0;
  const double mean_min = successes ? minimal_sum / successes : 0.0;
  const bool pass = rate >= kEngineMinSuccessRate && mean_card <= mean_min + kEngineCardinalitySlack &&
                    secs < kEngineSeconds;
  return {pass, fmt::format("success {}/{} ({:.2f}%), mean |S*| {:.3f} vs minimal {:.3f}, {:.2f} s", successes,
                            trials, 100.0 * rate, mean_card, mean_min, secs)};
}

CheckResult query_accounting() {
  std::mt19937_64 rng(404);
  const TokenOverlapSimilarity sim;
  std::uniform_int_distribution<std::size_t> gens(1, 300);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < kAccountingRuns; ++i) {
    auto p = random_problem(rng, 2000);
    CountingOracle counting(p.oracle);
    auto c = engine_config(i, gens(rng));
    if (i % 3 == 0) c.max_queries = c.max_generations;  // tighter than 3T
    const auto r = run_attack(p.instance.tokens, p.instance.candidates, AttackGoal::untargeted(p.instance.label),
                              counting, sim, c);
    const std::set<std::string> distinct(counting.seen.begin(), counting.seen.end());
    const bool ok = r.oracle_queries <= 3 * c.max_generations && r.oracle_queries <= c.max_queries &&
                    r.oracle_queries == counting.texts_seen && distinct.size() == r.oracle_queries;
    bad += !ok;
  }

  // Scripted revisits: nothing flips, so the run circles a 9-solution space.
  LexiconClassifier stuck({{"good", 9.0}, {"fine", 9.0}, {"nice", 9.0}});
  CountingOracle short_count(stuck), long_count(stuck);
  const auto shortr = run_attack(toy_tokens(), toy_sets(), AttackGoal::untargeted(1), short_count, sim,
                                 engine_config(5, 50));
  const auto longr = run_attack(toy_tokens(), toy_sets(), AttackGoal::untargeted(1), long_count, sim,
                                engine_config(5, 500));
  const bool revisits = shortr.cache_hits > 0 && longr.cache_hits > 0 && longr.oracle_queries <= 9 &&
                        shortr.oracle_queries <= 9 && long_count.texts_seen == longr.oracle_queries;
  return {bad == 0 && revisits,
          fmt::format("{} of {} runs broke the count; revisit run: {} queries, {} cache hits", bad, kAccountingRuns,
                      longr.oracle_queries, longr.cache_hits)};
}

CheckResult local_optimality() {
  const TokenOverlapSimilarity sim;
  std::size_t exhausted = 0, violated = 0, runs = 0;
  auto check = [&](const TokenSequence& x, const CandidateSets& sets, const AttackGoal& goal, VictimOracle& oracle,
                   std::uint64_t seed) {
    ++runs;
    const auto r = run_attack(x, sets, goal, oracle, sim, engine_config(seed, 2000));
    if (r.termination != Termination::NeighborhoodExhausted) return;
    ++exhausted;
    for (const auto& n : enumerate_neighbors(r.best.solution, sets)) {
      if (eval_objectives(x, sets, n, goal, oracle, sim).f1 > r.best.objectives.f1) ++violated;
    }
  };
  auto toy = toy_lexicon();
  LexiconClassifier stuck({{"good", 9.0}, {"fine", 8.0}, {"nice", 9.5}, {"film", 0.5}});
  for (std::uint64_t s = 0; s < kLocalOptimaRuns / 2; ++s) {
    check(toy_tokens(), toy_sets(), AttackGoal::untargeted(1), toy, s);
    check(toy_tokens(), toy_sets(), AttackGoal::untargeted(1), stuck, s);
  }
  return {exhausted > 0 && violated == 0,
          fmt::format("{} of {} toy runs ended NeighborhoodExhausted, {} improving neighbors", exhausted, runs,
                      violated)};
}

CheckResult determinism() {
  std::mt19937_64 rng(505);
  const EmbeddingSimilarity sim(toy_embeddings());
  std::size_t identical = 0;
  constexpr std::size_t kRuns = 20;
  for (std::size_t i = 0; i < kRuns; ++i) {
    auto p = random_problem(rng);
    auto c = engine_config(1000 + i, 400);
    c.record_trajectory = true;
    const AttackGoal goal = AttackGoal::untargeted(p.instance.label);
    const auto a = run_attack(p.instance.tokens, p.instance.candidates, goal, p.oracle, sim, c);
    const auto b = run_attack(p.instance.tokens, p.instance.candidates, goal, p.oracle, sim, c);
    identical += a.to_json(p.instance.candidates, c.mode).dump() == b.to_json(p.instance.candidates, c.mode).dump() &&
                 a.trajectory_csv() == b.trajectory_csv();
  }

  const auto shared = random_problem(rng);
  std::vector<AttackInstance> dataset;
  for (int i = 0; i < 32; ++i) {
    auto p = random_problem(rng);
    p.instance.label = shared.oracle.lexicon_classify(p.instance.tokens).label;
    dataset.push_back(std::move(p.instance));
  }
  CampaignConfig cfg;
  cfg.dataset_path = "in-memory";
  cfg.min_length = 1;
  cfg.engine = engine_config(9, 300);
  const OracleFactory factory = [&] { return std::make_unique<LexiconClassifier>(shared.oracle); };
  cfg.parallelism = 1;
  const auto serial = run_campaign(dataset, cfg, factory, sim);
  cfg.parallelism = 4;
  const auto parallel = run_campaign(dataset, cfg, factory, sim);
  const bool campaign_same = serial.records.size() == dataset.size() && serial.to_csv() == parallel.to_csv();
  return {identical == kRuns && campaign_same,
          fmt::format("{}/{} repeated runs byte-identical; campaign 1 vs 4 workers {}", identical, kRuns,
                      campaign_same ? "identical" : "DIFFERENT")};
}

CheckResult decision_semantics() {
  auto oracle = toy_lexicon(QueryMode::Decision);
  const TokenOverlapSimilarity sim;
  const auto ref = exhaustive_reference(toy_tokens(), toy_sets(), AttackGoal::untargeted(1), oracle, sim);
  std::size_t wrong = 0, failures = 0, wins = 0;
  for (const auto& e : ref.all) {
    const auto& f1 = e.objectives.f1;
    const double card = static_cast<double>(e.solution.cardinality());
    if (f1.is_success()) {
      ++wins;
      wrong += !(f1 > F1Value::real(1e308)) || !std::isinf(f1.numeric(QueryMode::Decision));
      for (const auto& other : ref.all) {
        if (!other.objectives.f1.is_success()) wrong += !(f1 > other.objectives.f1);
      }
    } else {
      ++failures;
      wrong += f1.value() != card || f1.numeric(QueryMode::Decision) != card;
    }
  }

  SoftmaxLexicon nli(3, {{"yes", {3.0, 0.0, 0.0}}, {"maybe", {0.0, 3.0, 0.0}}, {"no", {0.0, 0.0, 3.0}}},
                     QueryMode::Decision);
  const TokenSequence x({"the", "answer", "is", "maybe", "probably"});
  const CandidateSets sets(x, {{}, {}, {}, {"yes", "no", "perhaps"}, {"likely"}});
  std::size_t targeted_ok = 0;
  constexpr std::size_t kTargetedRuns = 10;
  for (std::uint64_t s = 0; s < kTargetedRuns; ++s) {
    const auto r = run_attack(x, sets, AttackGoal::targeted(1, 2), nli, sim, engine_config(s, 200, QueryMode::Decision));
    targeted_ok += r.success && nli.classify_one(r.adversarial).label == 2;
  }
  return {wrong == 0 && wins > 0 && failures > 0 && targeted_ok == kTargetedRuns,
          fmt::format("{} unsuccessful / {} successful toy solutions checked, {} mismatches; targeted 3-class {}/{}",
                      failures, wins, wrong, targeted_ok, kTargetedRuns)};
}

CheckResult probes() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> w(0.0, 2.0);
  std::vector<double> weights(kMaxProbeGroundSize);
  for (auto& v : weights) v = w(rng);
  const SetFunction additive = [&](std::uint64_t m) {
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (m >> i & 1) s += weights[i];
    }
    return std::optional<double>(s);
  };

  // Six positions with a lowering and a raising substitute each: twelve items.
  std::vector<std::string> tokens = {"anchor"};
  std::vector<std::vector<std::string>> cands = {{}};
  std::unordered_map<std::string, double> lex = {{"anchor", 4.0}};
  for (int i = 0; i < 6; ++i) {
    tokens.push_back("w" + std::to_string(i));
    cands.push_back({"down" + std::to_string(i), "up" + std::to_string(i)});
    lex["down" + std::to_string(i)] = -0.5;
    lex["up" + std::to_string(i)] = 0.3;
  }
  const TokenSequence x(tokens);
  const CandidateSets sets(x, cands);
  LexiconClassifier clf(lex);
  const auto table = tabulate_f1(x, sets, AttackGoal::untargeted(1), clf, QueryMode::Score);

  auto timed = [](auto&& f) {
    const auto start = Clock::now();
    const auto r = f();
    return std::make_pair(r, seconds_since(start));
  };
  const auto [am, ams] = timed([&] { return probe_monotonicity(additive, kMaxProbeGroundSize); });
  const auto [as, ass] = timed([&] { return probe_submodularity(additive, kMaxProbeGroundSize); });
  const auto [fm, fms] = timed([&] { return probe_monotonicity(table.function(), table.ground_size()); });
  const auto [fs, fss] = timed([&] { return probe_submodularity(table.function(), table.ground_size()); });
  const double slowest = std::max({ams, ass, fms, fss});
  const bool pass = am.empty() && as.empty() && !fm.empty() && !fs.empty() && table.ground_size() == 12 &&
                    slowest < kProbeSeconds;
  return {pass, fmt::format("additive: {} + {} violations; sigmoid f1 (12 items): {} monotonicity, {} "
                            "submodularity violations; slowest probe {:.3f} s",
                            am.violations, as.violations, fm.violations, fs.violations, slowest)};
}

AttackInstance five_flip_instance(std::size_t n) {
  std::vector<std::string> tokens(n, "filler");
  std::vector<std::vector<std::string>> cands(n);
  for (std::size_t i = 0; i < 5; ++i) {
    tokens[i] = "good";
    cands[i] = {"meh"};
  }
  TokenSequence x(tokens);
  return {"five" + std::to_string(n), x, 1, CandidateSets(x, cands)};
}

CheckResult harness_rules() {
  LexiconClassifier lex({{"good", 1.0}});
  const TokenOverlapSimilarity sim;
  CampaignConfig cfg;
  cfg.dataset_path = "in-memory";
  cfg.engine = engine_config(17, 300);
  cfg.modification_cap = kModificationCap;

  const std::vector<AttackInstance> dataset = {five_flip_instance(9), five_flip_instance(10), five_flip_instance(100),
                                                five_flip_instance(101), five_flip_instance(20),
                                                five_flip_instance(19)};
  const OracleFactory factory = [&] { return std::make_unique<LexiconClassifier>(lex); };
  const auto report = run_campaign(dataset, cfg, factory, sim);
  if (report.records.size() != dataset.size()) return {false, "campaign dropped records"};
  const auto& r = report.records;
  const bool lengths = r[0].reason == "TooShort" && r[1].attacked() && r[2].attacked() && r[3].reason == "TooLong";
  const bool boundary = r[4].outcome == Outcome::Success && r[4].modification_rate == 0.25 &&
                        r[5].outcome == Outcome::ModificationCap;
  const bool rule = within_modification_cap(2500.0 / 10000.0, kModificationCap) &&
                    !within_modification_cap(2501.0 / 10000.0, kModificationCap);
  return {lengths && boundary && rule,
          fmt::format("lengths 9/10/100/101 -> {}/{}/{}/{}; 5 of 20 -> {}; 5 of 19 -> {}; 0.2501 {}",
                      to_string(r[0].outcome), to_string(r[1].outcome), to_string(r[2].outcome),
                      to_string(r[3].outcome), to_string(r[4].outcome), to_string(r[5].outcome),
                      rule ? "rejected" : "ACCEPTED")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<CheckResult()>>> criteria = {
      {"dominance oracle equivalence", dominance_equivalence},
      {"archive correctness", archive_correctness},
      {"engine vs exhaustive reference", engine_vs_exhaustive},
      {"query accounting", query_accounting},
      {"local optimality on termination", local_optimality},
      {"determinism", determinism},
      {"decision-mode semantics", decision_semantics},
      {"monotonicity/submodularity probes", probes},
      {"harness rules", harness_rules},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    CheckResult v{false, ""};
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %-36s %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
