#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hydra/search_space.hpp"

namespace hydra {

enum class QueryMode { Score, Decision };

std::string_view to_string(QueryMode mode) noexcept;
QueryMode parse_query_mode(std::string_view text);

/// What a victim model says about one input. `probabilities` is present only
/// when the oracle runs in Score mode.
struct Verdict {
  int label = 0;
  std::optional<std::vector<double>> probabilities;
};

/// Black-box victim model. One `classify` call is one logical query batch.
class VictimOracle {
 public:
  virtual ~VictimOracle() = default;
  virtual QueryMode mode() const = 0;
  virtual int num_classes() const = 0;
  virtual std::vector<Verdict> classify(std::span<const TokenSequence> texts) = 0;

  Verdict classify_one(const TokenSequence& text);
};

/// Semantic similarity in [-1, 1]. Must not consult the victim model.
class SimilarityProvider {
 public:
  virtual ~SimilarityProvider() = default;
  virtual double similarity(const TokenSequence& a, const TokenSequence& b) const = 0;
};

struct AttackGoal {
  enum class Kind { Untargeted, Targeted };

  Kind kind = Kind::Untargeted;
  int original_label = 0;
  int target_label = -1;

  static AttackGoal untargeted(int original);
  static AttackGoal targeted(int original, int target);

  bool is_targeted() const noexcept { return kind == Kind::Targeted; }
  /// Throws InvalidLabel when labels fall outside [0, num_classes) or the
  /// target equals the original.
  void validate(int num_classes) const;
  /// Whether a prediction counts as a successful attack.
  bool achieved_by(int predicted) const noexcept;
};

/// f1 with an ordered success sentinel: every Success compares equal and
/// above every Real value, which covers both the score-based plateau at 1
/// and the decision-based +inf.
class F1Value {
 public:
  static F1Value success() noexcept { return F1Value(true, 0.0); }
  static F1Value real(double v) noexcept { return F1Value(false, v); }

  bool is_success() const noexcept { return success_; }
  /// Numeric value of a Real; meaningless for Success.
  double value() const noexcept { return value_; }
  /// Plain scalar form: 1 (score) or +inf (decision) on success.
  double numeric(QueryMode mode) const noexcept;

  friend std::weak_ordering operator<=>(const F1Value& a, const F1Value& b) noexcept {
    if (a.success_ || b.success_) {
      if (a.success_ == b.success_) return std::weak_ordering::equivalent;
      return a.success_ ? std::weak_ordering::greater : std::weak_ordering::less;
    }
    if (a.value_ < b.value_) return std::weak_ordering::less;
    if (a.value_ > b.value_) return std::weak_ordering::greater;
    return std::weak_ordering::equivalent;
  }
  friend bool operator==(const F1Value& a, const F1Value& b) noexcept { return (a <=> b) == 0; }

 private:
  F1Value(bool s, double v) noexcept : success_(s), value_(v) {}
  bool success_;
  double value_;
};

struct ObjectiveVector {
  F1Value f1 = F1Value::real(0.0);
  int f2 = 0;      // -|S|
  double f3 = 1.0;
  bool success = false;

  static ObjectiveVector make(F1Value f1, int f2, double f3) { return {f1, f2, f3, f1.is_success()}; }
};

bool operator==(const ObjectiveVector& a, const ObjectiveVector& b) noexcept;

F1Value eval_f1(const AttackGoal& goal, QueryMode mode, const Verdict& verdict, std::size_t cardinality);

/// Objectives for a solution whose adversarial text has already been
/// classified. Shared by single and batched evaluation paths.
ObjectiveVector score_verdict(const TokenSequence& original, const TokenSequence& adversarial,
                              std::size_t cardinality, const AttackGoal& goal, QueryMode mode,
                              const Verdict& verdict, const SimilarityProvider& sim);

/// One oracle query on apply_solution(x, B, S).
ObjectiveVector eval_objectives(const TokenSequence& x, const CandidateSets& sets, const Solution& s,
                                const AttackGoal& goal, VictimOracle& oracle, const SimilarityProvider& sim);

nlohmann::json to_json(const F1Value& f1);
nlohmann::json to_json(const ObjectiveVector& v);

}  // namespace hydra
