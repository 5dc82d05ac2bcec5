#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hydra/engine.hpp"
#include "hydra/objectives.hpp"
#include "hydra/oracles.hpp"
#include "hydra/search_space.hpp"

namespace hydra {

// --- target labels ---------------------------------------------------------

/// Label indices of a three-way entailment task.
struct EntailmentLabels {
  int entailment = 0;
  int neutral = 1;
  int contradiction = 2;
};

enum class TargetRule { Entailment, Uniform };

/// Picks the target class for a targeted attack from a draw r in [0, 1].
/// With the Entailment rule on a 3-class task: contradiction -> entailment,
/// entailment -> contradiction, neutral -> entailment if r <= 0.5 else
/// contradiction. Otherwise a uniformly chosen label other than `label`.
int assign_target_label(int label, int num_classes, double r, TargetRule rule = TargetRule::Entailment,
                        const EntailmentLabels& names = {});
int assign_target_label(int label, int num_classes, Rng& rng, TargetRule rule = TargetRule::Entailment,
                        const EntailmentLabels& names = {});

// --- configuration ---------------------------------------------------------

struct OracleSpec {
  enum class Kind { Lexicon, Remote };
  Kind kind = Kind::Lexicon;
  std::string lexicon_path;
  RemoteEndpoint endpoint;
};

/// Whether Mod./Sim. means cover successful attacks only or every attacked
/// instance.
enum class MetricScope { Successes, AllAttacked };

struct CampaignConfig {
  std::string dataset_path;
  OracleSpec oracle;
  std::optional<std::string> embeddings_path;  // token overlap when absent
  bool targeted = false;
  TargetRule target_rule = TargetRule::Entailment;
  EntailmentLabels entailment_labels;
  EngineConfig engine;  // engine.rng_seed is the master seed
  std::size_t min_length = 10;
  std::size_t max_length = 100;
  double modification_cap = 0.25;
  std::size_t parallelism = 1;
  MetricScope metric_scope = MetricScope::Successes;
  std::string report_csv;
  std::string report_json;

  /// Relative paths are resolved against `base_dir`.
  static CampaignConfig from_json(const nlohmann::json& j, const std::string& base_dir = {});
  static CampaignConfig load(const std::string& path);
};

/// HYDRA_SEED, when set, replaces the master seed.
void apply_env_overrides(CampaignConfig& cfg);

/// Seed for the instance at `index` of a campaign.
inline std::uint64_t instance_seed(std::uint64_t master, std::size_t index) noexcept {
  return master ^ static_cast<std::uint64_t>(index);
}

// --- records & report ------------------------------------------------------

enum class Outcome { Success, EngineFailure, ModificationCap, OriginalMisclassified, Skipped };

std::string_view to_string(Outcome o) noexcept;

struct InstanceRecord {
  std::size_t index = 0;
  std::string id;
  Outcome outcome = Outcome::Skipped;
  std::string reason;  // TooShort, TooLong, ModificationCap, termination reason, ...
  std::size_t length = 0;
  int label = 0;
  int target_label = -1;
  std::size_t cardinality = 0;
  double modification_rate = 0.0;
  double similarity = 0.0;
  std::size_t queries = 0;
  std::size_t cache_hits = 0;
  std::size_t generations = 0;
  std::string adversarial;

  bool attacked() const noexcept {
    return outcome == Outcome::Success || outcome == Outcome::EngineFailure || outcome == Outcome::ModificationCap;
  }
};

struct Aggregates {
  std::size_t total = 0;
  std::size_t attacked = 0;
  std::size_t successes = 0;
  std::size_t engine_failures = 0;
  std::size_t modification_capped = 0;
  std::size_t misclassified = 0;
  std::size_t skipped = 0;
  std::optional<double> success_rate;            // percent of attacked
  std::optional<double> mean_modification_rate;  // percent
  std::optional<double> mean_similarity;
  std::optional<double> mean_queries;            // over attacked

  friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

Aggregates aggregate_metrics(std::span<const InstanceRecord> records, MetricScope scope = MetricScope::Successes);

struct CampaignReport {
  std::vector<InstanceRecord> records;  // dataset order
  Aggregates aggregates;
  MetricScope metric_scope = MetricScope::Successes;
  bool aborted = false;
  std::string abort_message;

  std::string to_csv() const;
  nlohmann::json to_json() const;
  /// Human summary, means to two decimals.
  std::string summary() const;
};

/// A success counts only when at most `cap` of the input was changed.
inline bool within_modification_cap(double rate, double cap) noexcept { return rate <= cap; }

// --- running ---------------------------------------------------------------

using OracleFactory = std::function<std::unique_ptr<VictimOracle>()>;

OracleFactory make_oracle_factory(const OracleSpec& spec, QueryMode mode);
std::unique_ptr<SimilarityProvider> make_similarity(const std::optional<std::string>& embeddings_path);

std::vector<AttackInstance> load_dataset(const std::string& path);

/// Classifies one instance into its outcome bucket. Transport and protocol
/// errors propagate.
InstanceRecord attack_instance(const AttackInstance& instance, std::size_t index, const CampaignConfig& cfg,
                               VictimOracle& oracle, const SimilarityProvider& sim);

/// Runs every instance with `cfg.parallelism` workers, each owning one
/// oracle from `factory`. A transport failure stops the campaign and returns
/// the records finished so far with `aborted` set.
CampaignReport run_campaign(std::span<const AttackInstance> dataset, const CampaignConfig& cfg,
                            const OracleFactory& factory, const SimilarityProvider& sim);
CampaignReport run_campaign(const CampaignConfig& cfg);

void write_reports(const CampaignReport& report, const CampaignConfig& cfg);

}  // namespace hydra
