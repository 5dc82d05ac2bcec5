#include <algorithm>
#include <bit>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hydra/engine.hpp"
#include "hydra/error.hpp"
#include "hydra/harness.hpp"
#include "hydra/oracles.hpp"
#include "hydra/probes.hpp"
#include "hydra/similarity.hpp"

namespace {

using namespace hydra;

struct OracleOptions {
  std::string lexicon;
  std::string remote;  // host:port
  int timeout_ms = 5000;
  std::string embeddings;
  std::string mode = "score";
  std::optional<int> target;

  void add_to(CLI::App& app) {
    auto* lex = app.add_option("--lexicon", lexicon, "Lexicon oracle weights (JSON)")->check(CLI::ExistingFile);
    auto* rem = app.add_option("--remote", remote, "Model server as host:port");
    lex->excludes(rem);
    app.add_option("--timeout-ms", timeout_ms, "Remote read timeout")->capture_default_str();
    app.add_option("--embeddings", embeddings, "word2vec text embeddings; token overlap when omitted")
        ->check(CLI::ExistingFile);
    app.add_option("--mode", mode, "score or decision")
        ->check(CLI::IsMember({"score", "decision"}))
        ->capture_default_str();
    app.add_option("--target", target, "Target label for a targeted attack");
  }

  QueryMode query_mode() const { return parse_query_mode(mode); }

  std::unique_ptr<VictimOracle> make_oracle() const {
    if (!lexicon.empty()) return std::make_unique<LexiconClassifier>(LexiconClassifier::load(lexicon, query_mode()));
    if (remote.empty()) throw Error(ErrorCode::InvalidConfig, "pass --lexicon or --remote");
    const auto colon = remote.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--remote expects host:port");
    RemoteEndpoint ep;
    ep.host = remote.substr(0, colon);
    ep.port = static_cast<std::uint16_t>(std::stoi(remote.substr(colon + 1)));
    ep.timeout = std::chrono::milliseconds(timeout_ms);
    return std::make_unique<RemoteOracle>(ep, query_mode());
  }

  std::unique_ptr<SimilarityProvider> make_similarity() const {
    return hydra::make_similarity(embeddings.empty() ? std::nullopt : std::optional<std::string>(embeddings));
  }

  AttackGoal goal(int label) const {
    return target ? AttackGoal::targeted(label, *target) : AttackGoal::untargeted(label);
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::size_t parse_size(const std::string& s) {
  std::size_t used = 0;
  const unsigned long v = std::stoul(s, &used);
  if (used != s.size()) throw Error(ErrorCode::InvalidConfig, "not a count: " + s);
  return v;
}

/// cardinality:N, neg-cardinality:N, modular:w1,w2,..., coverage:a.b,b.c,...
std::pair<SetFunction, std::size_t> builtin_function(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidConfig, "function spec needs kind:args");
  const std::string kind = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  if (kind == "cardinality" || kind == "neg-cardinality") {
    const double sign = kind == "cardinality" ? 1.0 : -1.0;
    return {[sign](std::uint64_t m) { return std::optional<double>(sign * std::popcount(m)); }, parse_size(args)};
  }
  if (kind == "modular") {
    std::vector<double> w;
    for (const auto& t : split(args, ',')) w.push_back(std::stod(t));
    return {[w](std::uint64_t m) {
              double s = 0.0;
              for (std::size_t i = 0; i < w.size(); ++i) {
                if (m >> i & 1) s += w[i];
              }
              return std::optional<double>(s);
            },
            w.size()};
  }
  if (kind == "coverage") {
    std::vector<std::vector<std::string>> covers;
    for (const auto& t : split(args, ',')) covers.push_back(split(t, '.'));
    return {[covers](std::uint64_t m) {
              std::vector<std::string> u;
              for (std::size_t i = 0; i < covers.size(); ++i) {
                if (m >> i & 1) u.insert(u.end(), covers[i].begin(), covers[i].end());
              }
              std::sort(u.begin(), u.end());
              return std::optional<double>(static_cast<double>(std::unique(u.begin(), u.end()) - u.begin()));
            },
            covers.size()};
  }
  throw Error(ErrorCode::InvalidConfig, "unknown function kind '" + kind + "'");
}

std::string mask_string(std::uint64_t m) {
  std::string out = "{";
  for (unsigned i = 0; m; ++i, m >>= 1) {
    if (m & 1) out += (out.size() > 1 ? "," : "") + std::to_string(i);
  }
  return out + "}";
}

int run_probe(const std::string& spec, const std::string& instance_path, const OracleOptions& oo,
              std::size_t show) {
  SetFunction f;
  std::size_t ground = 0;
  std::optional<TabulatedSetFunction> table;
  if (spec == "f1") {
    if (instance_path.empty()) throw Error(ErrorCode::InvalidConfig, "probe f1 needs --instance");
    const auto inst = load_instance(instance_path);
    auto oracle = oo.make_oracle();
    table = tabulate_f1(inst.tokens, inst.candidates, oo.goal(inst.label), *oracle, oo.query_mode());
    f = table->function();
    ground = table->ground_size();
    for (std::size_t i = 0; i < ground; ++i) {
      const auto& c = table->items[i];
      fmt::print("item {}: position {} -> {}\n", i, c.position, inst.candidates.word(c.position, c.candidate));
    }
  } else {
    std::tie(f, ground) = builtin_function(spec);
  }
  const auto mono = probe_monotonicity(f, ground);
  const auto sub = probe_submodularity(f, ground);
  fmt::print("ground set: {}\n", ground);
  fmt::print("monotonicity violations: {} (pairs checked {})\n", mono.violations, mono.checked);
  for (std::size_t i = 0; i < std::min(show, mono.witnesses.size()); ++i) {
    const auto& w = mono.witnesses[i];
    fmt::print("  f({}) = {} > f({}) = {}\n", mask_string(w.subset), w.f_subset, mask_string(w.superset),
               w.f_superset);
  }
  fmt::print("submodularity violations: {} (triples checked {})\n", sub.violations, sub.checked);
  for (std::size_t i = 0; i < std::min(show, sub.witnesses.size()); ++i) {
    const auto& w = sub.witnesses[i];
    fmt::print("  gain of {} at {} = {} < gain at {} = {}\n", w.element, mask_string(w.smaller), w.gain_smaller,
               mask_string(w.larger), w.gain_larger);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective black-box word-substitution attacks"};
  app.require_subcommand(1);

  // attack --config <json>
  auto* attack = app.add_subcommand("attack", "Run an attack campaign over a dataset");
  std::string config_path, out_dir;
  std::optional<std::size_t> parallelism;
  attack->add_option("--config", config_path, "Campaign config (JSON)");
  attack->add_option("--out-dir", out_dir, "Write report.csv and report.json here instead of the config paths");
  attack->add_option("--parallelism", parallelism, "Worker count override");

  // attack one --instance <json> --seed <n>
  auto* one = attack->add_subcommand("one", "Attack a single instance and print the result JSON");
  std::string instance_path, trajectory_path;
  std::uint64_t seed = 0;
  EngineConfig engine;
  OracleOptions one_opts;
  one->add_option("--instance", instance_path, "Attack instance (JSON)")->required()->check(CLI::ExistingFile);
  one->add_option("--seed", seed, "Random seed")->capture_default_str();
  one->add_option("--max-generations", engine.max_generations, "Generation cap T")->capture_default_str();
  one->add_option("--max-queries", engine.max_queries, "Query budget")->capture_default_str();
  one->add_option("--trajectory", trajectory_path, "Write the per-generation trajectory CSV here");
  one_opts.add_to(*one);

  auto* enumerate = app.add_subcommand("enumerate", "Exhaustively evaluate every feasible solution");
  OracleOptions enum_opts;
  std::string enum_instance;
  enumerate->add_option("--instance", enum_instance, "Attack instance (JSON)")->required()->check(CLI::ExistingFile);
  enum_opts.add_to(*enumerate);

  auto* probe = app.add_subcommand("probe", "Check a set function for monotonicity and submodularity");
  std::string function_spec, probe_instance;
  std::size_t show = 5;
  OracleOptions probe_opts;
  probe
      ->add_option("--function", function_spec,
                   "cardinality:N | neg-cardinality:N | modular:w1,w2,... | coverage:a.b,b.c,... | f1")
      ->required();
  probe->add_option("--instance", probe_instance, "Instance for --function f1")->check(CLI::ExistingFile);
  probe->add_option("--witnesses", show, "Witnesses to print per property")->capture_default_str();
  probe_opts.add_to(*probe);

  CLI11_PARSE(app, argc, argv);

  try {
    if (one->parsed()) {
      const auto inst = load_instance(instance_path);
      auto oracle = one_opts.make_oracle();
      const auto sim = one_opts.make_similarity();
      engine.rng_seed = seed;
      engine.mode = one_opts.query_mode();
      engine.record_trajectory = !trajectory_path.empty();
      const auto result = run_attack(inst.tokens, inst.candidates, one_opts.goal(inst.label), *oracle, *sim, engine);
      std::cout << result.to_json(inst.candidates, engine.mode).dump(2) << '\n';
      if (!trajectory_path.empty()) std::ofstream(trajectory_path) << result.trajectory_csv();
      return 0;
    }
    if (attack->parsed()) {
      if (config_path.empty()) throw Error(ErrorCode::InvalidConfig, "attack needs --config (or the 'one' subcommand)");
      auto cfg = CampaignConfig::load(config_path);
      apply_env_overrides(cfg);
      if (parallelism) cfg.parallelism = std::max<std::size_t>(1, *parallelism);
      if (!out_dir.empty()) {
        cfg.report_csv = out_dir + "/report.csv";
        cfg.report_json = out_dir + "/report.json";
      }
      const auto report = run_campaign(cfg);
      write_reports(report, cfg);
      std::cout << report.summary();
      return report.aborted ? 1 : 0;
    }
    if (enumerate->parsed()) {
      const auto inst = load_instance(enum_instance);
      auto oracle = enum_opts.make_oracle();
      const auto sim = enum_opts.make_similarity();
      const auto ref = exhaustive_reference(inst.tokens, inst.candidates, enum_opts.goal(inst.label), *oracle, *sim,
                                            enum_opts.query_mode());
      std::cout << ref.to_json(inst.candidates).dump(2) << '\n';
      return 0;
    }
    if (probe->parsed()) return run_probe(function_spec, probe_instance, probe_opts, show);
  } catch (const std::exception& e) {
    std::cerr << "hydratext: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
