#include "hydra/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "hydra/error.hpp"
#include "hydra/similarity.hpp"

namespace hydra {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Target labels

int assign_target_label(int label, int num_classes, double r, TargetRule rule, const EntailmentLabels& names) {
  if (num_classes < 2) throw Error(ErrorCode::InvalidLabel, "targeted attacks need at least two classes");
  if (label < 0 || label >= num_classes) {
    throw Error(ErrorCode::InvalidLabel, fmt::format("label {} outside [0, {})", label, num_classes));
  }
  if (rule == TargetRule::Entailment && num_classes == 3) {
    if (label == names.contradiction) return names.entailment;
    if (label == names.entailment) return names.contradiction;
    if (label == names.neutral) return r <= 0.5 ? names.entailment : names.contradiction;
    throw Error(ErrorCode::InvalidLabel, "entailment label mapping does not cover label " + std::to_string(label));
  }
  const int others = num_classes - 1;
  int k = static_cast<int>(std::floor(r * others));
  k = std::clamp(k, 0, others - 1);
  return k < label ? k : k + 1;
}

int assign_target_label(int label, int num_classes, Rng& rng, TargetRule rule, const EntailmentLabels& names) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return assign_target_label(label, num_classes, unit(rng), rule, names);
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

CampaignConfig CampaignConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "campaign config must be a JSON object");
  CampaignConfig cfg;
  cfg.dataset_path = resolve(base_dir, get_or<std::string>(j, "dataset", ""));
  if (cfg.dataset_path.empty()) throw Error(ErrorCode::InvalidConfig, "config needs 'dataset'");

  const nlohmann::json oracle = j.value("oracle", nlohmann::json::object());
  const std::string kind = get_or<std::string>(oracle, "type", "lexicon");
  if (kind == "lexicon") {
    cfg.oracle.kind = OracleSpec::Kind::Lexicon;
    cfg.oracle.lexicon_path = resolve(base_dir, get_or<std::string>(oracle, "path", ""));
    if (cfg.oracle.lexicon_path.empty()) throw Error(ErrorCode::InvalidConfig, "lexicon oracle needs 'path'");
  } else if (kind == "remote") {
    cfg.oracle.kind = OracleSpec::Kind::Remote;
    cfg.oracle.endpoint.host = get_or<std::string>(oracle, "host", "127.0.0.1");
    cfg.oracle.endpoint.port = get_or<std::uint16_t>(oracle, "port", 0);
    cfg.oracle.endpoint.timeout = std::chrono::milliseconds(get_or<long long>(oracle, "timeout_ms", 5000));
    if (cfg.oracle.endpoint.port == 0) throw Error(ErrorCode::InvalidConfig, "remote oracle needs 'port'");
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown oracle type '" + kind + "'");
  }

  if (j.contains("embeddings") && !j["embeddings"].is_null()) {
    cfg.embeddings_path = resolve(base_dir, j["embeddings"].get<std::string>());
  }
  cfg.engine.mode = parse_query_mode(get_or<std::string>(j, "mode", "score"));

  const std::string goal = get_or<std::string>(j, "goal", "untargeted");
  if (goal == "targeted") {
    cfg.targeted = true;
  } else if (goal != "untargeted") {
    throw Error(ErrorCode::InvalidConfig, "goal must be untargeted|targeted");
  }
  const std::string rule = get_or<std::string>(j, "target_rule", "entailment");
  if (rule == "entailment") {
    cfg.target_rule = TargetRule::Entailment;
  } else if (rule == "uniform") {
    cfg.target_rule = TargetRule::Uniform;
  } else {
    throw Error(ErrorCode::InvalidConfig, "target_rule must be entailment|uniform");
  }
  if (j.contains("entailment_labels")) {
    const auto& l = j["entailment_labels"];
    cfg.entailment_labels = {get_or<int>(l, "entailment", 0), get_or<int>(l, "neutral", 1),
                             get_or<int>(l, "contradiction", 2)};
  }

  const nlohmann::json engine = j.value("engine", nlohmann::json::object());
  cfg.engine.max_generations = get_or<std::size_t>(engine, "max_generations", cfg.engine.max_generations);
  cfg.engine.max_queries = get_or<std::size_t>(engine, "max_queries", cfg.engine.max_queries);
  cfg.engine.rng_seed = get_or<std::uint64_t>(engine, "seed", get_or<std::uint64_t>(j, "seed", 0));
  cfg.engine.validate();

  cfg.min_length = get_or<std::size_t>(j, "min_length", cfg.min_length);
  cfg.max_length = get_or<std::size_t>(j, "max_length", cfg.max_length);
  cfg.modification_cap = get_or<double>(j, "modification_cap", cfg.modification_cap);
  cfg.parallelism = std::max<std::size_t>(1, get_or<std::size_t>(j, "parallelism", 1));
  const std::string scope = get_or<std::string>(j, "metrics_over", "successes");
  if (scope == "successes") {
    cfg.metric_scope = MetricScope::Successes;
  } else if (scope == "attacked") {
    cfg.metric_scope = MetricScope::AllAttacked;
  } else {
    throw Error(ErrorCode::InvalidConfig, "metrics_over must be successes|attacked");
  }
  cfg.report_csv = resolve(base_dir, get_or<std::string>(j, "report_csv", ""));
  cfg.report_json = resolve(base_dir, get_or<std::string>(j, "report_json", ""));
  if (cfg.min_length > cfg.max_length) throw Error(ErrorCode::InvalidConfig, "min_length exceeds max_length");
  return cfg;
}

CampaignConfig CampaignConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
  }
  return from_json(j, fs::path(path).parent_path().string());
}

void apply_env_overrides(CampaignConfig& cfg) {
  if (const char* seed = std::getenv("HYDRA_SEED"); seed && *seed) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(seed, &end, 10);
    if (*end != '\0') throw Error(ErrorCode::InvalidConfig, std::string("HYDRA_SEED is not an integer: ") + seed);
    cfg.engine.rng_seed = v;
  }
}

// ---------------------------------------------------------------------------
// Records and aggregation

std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::Success: return "Success";
    case Outcome::EngineFailure: return "EngineFailure";
    case Outcome::ModificationCap: return "ModificationCap";
    case Outcome::OriginalMisclassified: return "OriginalMisclassified";
    case Outcome::Skipped: return "Skipped";
  }
  return "Unknown";
}

Aggregates aggregate_metrics(std::span<const InstanceRecord> records, MetricScope scope) {
  Aggregates a;
  a.total = records.size();
  double mod_sum = 0.0, sim_sum = 0.0, query_sum = 0.0;
  std::size_t metric_count = 0;
  for (const auto& r : records) {
    switch (r.outcome) {
      case Outcome::Success: ++a.successes; break;
      case Outcome::EngineFailure: ++a.engine_failures; break;
      case Outcome::ModificationCap: ++a.modification_capped; break;
      case Outcome::OriginalMisclassified: ++a.misclassified; break;
      case Outcome::Skipped: ++a.skipped; break;
    }
    if (!r.attacked()) continue;
    ++a.attacked;
    query_sum += static_cast<double>(r.queries);
    if (scope == MetricScope::AllAttacked || r.outcome == Outcome::Success) {
      mod_sum += r.modification_rate;
      sim_sum += r.similarity;
      ++metric_count;
    }
  }
  if (a.attacked > 0) {
    a.success_rate = 100.0 * static_cast<double>(a.successes) / static_cast<double>(a.attacked);
    a.mean_queries = query_sum / static_cast<double>(a.attacked);
  }
  if (metric_count > 0) {
    a.mean_modification_rate = 100.0 * mod_sum / static_cast<double>(metric_count);
    a.mean_similarity = sim_sum / static_cast<double>(metric_count);
  }
  return a;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

std::string optional_fixed(const std::optional<double>& v, const char* suffix = "") {
  return v ? fmt::format("{:.2f}{}", *v, suffix) : std::string("n/a");
}

}  // namespace

std::string CampaignReport::to_csv() const {
  std::string out =
      "index,id,outcome,reason,length,label,target_label,cardinality,modification_rate,similarity,queries,"
      "cache_hits,generations\n";
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.index, csv_field(r.id), to_string(r.outcome),
                       csv_field(r.reason), r.length, r.label, r.target_label, r.cardinality, r.modification_rate,
                       r.similarity, r.queries, r.cache_hits, r.generations);
  }
  return out;
}

nlohmann::json CampaignReport::to_json() const {
  const Aggregates& a = aggregates;
  nlohmann::json j;
  j["aggregates"] = {
      {"total", a.total},
      {"attacked", a.attacked},
      {"successes", a.successes},
      {"engine_failures", a.engine_failures},
      {"modification_capped", a.modification_capped},
      {"misclassified", a.misclassified},
      {"skipped", a.skipped},
      {"success_rate", optional_json(a.success_rate)},
      {"mean_modification_rate", optional_json(a.mean_modification_rate)},
      {"mean_similarity", optional_json(a.mean_similarity)},
      {"mean_queries", optional_json(a.mean_queries)},
  };
  j["metadata"] = {
      {"success_rate_units", "percent of attacked instances"},
      {"modification_rate_units", "percent"},
      {"mod_sim_averaged_over", metric_scope == MetricScope::Successes ? "successful attacks" : "attacked instances"},
      {"queries_averaged_over", "attacked instances, including failures"},
  };
  j["aborted"] = aborted;
  j["error"] = aborted ? nlohmann::json(abort_message) : nlohmann::json();
  return j;
}

std::string CampaignReport::summary() const {
  const Aggregates& a = aggregates;
  std::string out;
  out += fmt::format("instances: {}  attacked: {}  skipped: {}  misclassified: {}\n", a.total, a.attacked,
                     a.skipped, a.misclassified);
  out += fmt::format("Suc. {}  Mod. {}  Sim. {}  #Que. {}\n", optional_fixed(a.success_rate, "%"),
                     optional_fixed(a.mean_modification_rate, "%"), optional_fixed(a.mean_similarity),
                     optional_fixed(a.mean_queries));
  if (aborted) out += "campaign aborted: " + abort_message + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Running

OracleFactory make_oracle_factory(const OracleSpec& spec, QueryMode mode) {
  if (spec.kind == OracleSpec::Kind::Lexicon) {
    auto shared = std::make_shared<LexiconClassifier>(LexiconClassifier::load(spec.lexicon_path, mode));
    return [shared]() -> std::unique_ptr<VictimOracle> { return std::make_unique<LexiconClassifier>(*shared); };
  }
  return [spec, mode]() -> std::unique_ptr<VictimOracle> {
    return std::make_unique<RemoteOracle>(spec.endpoint, mode);
  };
}

std::unique_ptr<SimilarityProvider> make_similarity(const std::optional<std::string>& embeddings_path) {
  if (embeddings_path) return std::make_unique<EmbeddingSimilarity>(EmbeddingTable::load(*embeddings_path));
  return std::make_unique<TokenOverlapSimilarity>();
}

std::vector<AttackInstance> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::DatasetFormat, "cannot open dataset " + path);
  std::vector<AttackInstance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_instance(nlohmann::json::parse(line), std::to_string(out.size())));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::DatasetFormat, fmt::format("{}:{}: {}", path, line_no, e.what()));
    } catch (const Error& e) {
      throw Error(ErrorCode::DatasetFormat, fmt::format("{}:{}: {}", path, line_no, e.what()));
    }
  }
  return out;
}

InstanceRecord attack_instance(const AttackInstance& instance, std::size_t index, const CampaignConfig& cfg,
                               VictimOracle& oracle, const SimilarityProvider& sim) {
  InstanceRecord rec;
  rec.index = index;
  rec.id = instance.id;
  rec.length = instance.tokens.size();
  rec.label = instance.label;

  if (rec.length < cfg.min_length) {
    rec.outcome = Outcome::Skipped;
    rec.reason = "TooShort";
    return rec;
  }
  if (rec.length > cfg.max_length) {
    rec.outcome = Outcome::Skipped;
    rec.reason = "TooLong";
    return rec;
  }

  EngineConfig engine = cfg.engine;
  engine.rng_seed = instance_seed(cfg.engine.rng_seed, index);
  engine.record_trajectory = false;

  AttackGoal goal = AttackGoal::untargeted(instance.label);
  if (cfg.targeted) {
    Rng target_rng(engine.rng_seed);
    rec.target_label =
        assign_target_label(instance.label, oracle.num_classes(), target_rng, cfg.target_rule, cfg.entailment_labels);
    goal = AttackGoal::targeted(instance.label, rec.target_label);
  }

  AttackResult result;
  try {
    result = run_attack(instance.tokens, instance.candidates, goal, oracle, sim, engine);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OriginalMisclassified) throw;
    rec.outcome = Outcome::OriginalMisclassified;
    rec.reason = "OriginalMisclassified";
    rec.queries = 1;
    return rec;
  }

  rec.cardinality = result.best.solution.cardinality();
  rec.modification_rate = modification_rate(result.best.solution, rec.length);
  rec.similarity = result.best.objectives.f3;
  rec.queries = result.oracle_queries;
  rec.cache_hits = result.cache_hits;
  rec.generations = result.generations;
  rec.adversarial = result.adversarial.join();
  if (!result.success) {
    rec.outcome = Outcome::EngineFailure;
    rec.reason = std::string(to_string(result.termination));
  } else if (!within_modification_cap(rec.modification_rate, cfg.modification_cap)) {
    rec.outcome = Outcome::ModificationCap;
    rec.reason = "ModificationCap";
  } else {
    rec.outcome = Outcome::Success;
    rec.reason = std::string(to_string(result.termination));
  }
  return rec;
}

CampaignReport run_campaign(std::span<const AttackInstance> dataset, const CampaignConfig& cfg,
                            const OracleFactory& factory, const SimilarityProvider& sim) {
  std::vector<std::optional<InstanceRecord>> slots(dataset.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex error_mu;
  std::string first_error;

  auto worker = [&] {
    std::unique_ptr<VictimOracle> oracle;
    try {
      oracle = factory();
      for (;;) {
        if (abort.load()) return;
        const std::size_t i = next.fetch_add(1);
        if (i >= dataset.size()) return;
        slots[i] = attack_instance(dataset[i], i, cfg, *oracle, sim);
      }
    } catch (const std::exception& e) {
      std::lock_guard lock(error_mu);
      if (!abort.exchange(true)) first_error = e.what();
    }
  };

  const std::size_t workers = std::min(std::max<std::size_t>(cfg.parallelism, 1),
                                       std::max<std::size_t>(dataset.size(), 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  CampaignReport report;
  report.metric_scope = cfg.metric_scope;
  for (auto& s : slots) {
    if (s) report.records.push_back(std::move(*s));
  }
  report.aggregates = aggregate_metrics(report.records, cfg.metric_scope);
  report.aborted = abort.load();
  report.abort_message = first_error;
  return report;
}

CampaignReport run_campaign(const CampaignConfig& cfg) {
  const std::vector<AttackInstance> dataset = load_dataset(cfg.dataset_path);
  const auto sim = make_similarity(cfg.embeddings_path);
  return run_campaign(dataset, cfg, make_oracle_factory(cfg.oracle, cfg.engine.mode), *sim);
}

void write_reports(const CampaignReport& report, const CampaignConfig& cfg) {
  if (!cfg.report_csv.empty()) {
    std::ofstream out(cfg.report_csv);
    if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + cfg.report_csv);
    out << report.to_csv();
  }
  if (!cfg.report_json.empty()) {
    std::ofstream out(cfg.report_json);
    if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + cfg.report_json);
    out << report.to_json().dump(2) << '\n';
  }
}

}  // namespace hydra
