#include "hydra/objectives.hpp"

#include <array>
#include <limits>
#include <string>

#include "hydra/error.hpp"

namespace hydra {

std::string_view to_string(QueryMode mode) noexcept { return mode == QueryMode::Score ? "score" : "decision"; }

QueryMode parse_query_mode(std::string_view text) {
  if (text == "score") return QueryMode::Score;
  if (text == "decision") return QueryMode::Decision;
  throw Error(ErrorCode::InvalidConfig, "unknown mode '" + std::string(text) + "' (expected score|decision)");
}

Verdict VictimOracle::classify_one(const TokenSequence& text) {
  std::array<TokenSequence, 1> batch{text};
  auto out = classify(batch);
  if (out.size() != 1) throw Error(ErrorCode::ProtocolViolation, "oracle returned wrong batch size");
  return std::move(out.front());
}

AttackGoal AttackGoal::untargeted(int original) { return {Kind::Untargeted, original, -1}; }

AttackGoal AttackGoal::targeted(int original, int target) { return {Kind::Targeted, original, target}; }

void AttackGoal::validate(int num_classes) const {
  if (original_label < 0 || original_label >= num_classes) {
    throw Error(ErrorCode::InvalidLabel, "original label " + std::to_string(original_label) + " outside [0, " +
                                             std::to_string(num_classes) + ")");
  }
  if (kind == Kind::Targeted) {
    if (target_label < 0 || target_label >= num_classes) {
      throw Error(ErrorCode::InvalidLabel, "target label " + std::to_string(target_label) + " out of range");
    }
    if (target_label == original_label) {
      throw Error(ErrorCode::InvalidLabel, "target label equals the original label");
    }
  }
}

bool AttackGoal::achieved_by(int predicted) const noexcept {
  return kind == Kind::Targeted ? predicted == target_label : predicted != original_label;
}

double F1Value::numeric(QueryMode mode) const noexcept {
  if (!success_) return value_;
  return mode == QueryMode::Score ? 1.0 : std::numeric_limits<double>::infinity();
}

bool operator==(const ObjectiveVector& a, const ObjectiveVector& b) noexcept {
  return a.f1.is_success() == b.f1.is_success() && (a.f1.is_success() || a.f1.value() == b.f1.value()) &&
         a.f2 == b.f2 && a.f3 == b.f3 && a.success == b.success;
}

F1Value eval_f1(const AttackGoal& goal, QueryMode mode, const Verdict& verdict, std::size_t cardinality) {
  if (goal.achieved_by(verdict.label)) return F1Value::success();
  if (mode == QueryMode::Decision) return F1Value::real(static_cast<double>(cardinality));

  if (!verdict.probabilities) {
    throw Error(ErrorCode::MissingProbabilities, "score-based f1 needs a probability vector");
  }
  const auto& p = *verdict.probabilities;
  const int cls = goal.is_targeted() ? goal.target_label : goal.original_label;
  if (cls < 0 || static_cast<std::size_t>(cls) >= p.size()) {
    throw Error(ErrorCode::ProtocolViolation, "probability vector too short for label " + std::to_string(cls));
  }
  return goal.is_targeted() ? F1Value::real(p[cls]) : F1Value::real(1.0 - p[cls]);
}

ObjectiveVector score_verdict(const TokenSequence& original, const TokenSequence& adversarial,
                              std::size_t cardinality, const AttackGoal& goal, QueryMode mode,
                              const Verdict& verdict, const SimilarityProvider& sim) {
  const F1Value f1 = eval_f1(goal, mode, verdict, cardinality);
  return ObjectiveVector::make(f1, -static_cast<int>(cardinality), sim.similarity(adversarial, original));
}

ObjectiveVector eval_objectives(const TokenSequence& x, const CandidateSets& sets, const Solution& s,
                                const AttackGoal& goal, VictimOracle& oracle, const SimilarityProvider& sim) {
  const TokenSequence adv = apply_solution(x, sets, s);
  const Verdict verdict = oracle.classify_one(adv);
  return score_verdict(x, adv, s.cardinality(), goal, oracle.mode(), verdict, sim);
}

nlohmann::json to_json(const F1Value& f1) {
  if (f1.is_success()) return "success";
  return f1.value();
}

nlohmann::json to_json(const ObjectiveVector& v) {
  return {{"f1", to_json(v.f1)}, {"f2", v.f2}, {"f3", v.f3}, {"success", v.success}};
}

}  // namespace hydra
