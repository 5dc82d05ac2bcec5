#include "hydra/pareto.hpp"

#include <iterator>

#include "hydra/error.hpp"

namespace hydra {

bool weakly_dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept {
  return a.f1 >= b.f1 && a.f2 >= b.f2;
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept {
  if (weakly_dominates(a, b) && (a.f1 > b.f1 || a.f2 > b.f2)) return true;
  return a.f1 == b.f1 && a.f2 == b.f2 && a.f3 > b.f3;
}

Population::Population(ScoredSolution initial) {
  const int key = -initial.objectives.f2;
  entries_.emplace(key, std::move(initial));
}

bool Population::insert(ScoredSolution o) {
  for (const auto& [_, e] : entries_) {
    if (dominates(e.objectives, o.objectives)) return false;
  }
  std::erase_if(entries_, [&](const auto& kv) { return weakly_dominates(o.objectives, kv.second.objectives); });
  const int key = -o.objectives.f2;
  entries_.insert_or_assign(key, std::move(o));
  return true;
}

const ScoredSolution& Population::best() const {
  if (entries_.empty()) throw Error(ErrorCode::EmptyPopulation, "population has no entries");
  // Largest cardinality carries the largest f1.
  return std::prev(entries_.end())->second;
}

const ScoredSolution& Population::at(std::size_t index) const {
  if (index >= entries_.size()) throw Error(ErrorCode::EmptyPopulation, "population index out of range");
  return std::next(entries_.begin(), static_cast<std::ptrdiff_t>(index))->second;
}

std::vector<std::string> Population::check_invariants(std::size_t n) const {
  std::vector<std::string> problems;
  if (entries_.size() > n + 1) {
    problems.push_back("population holds " + std::to_string(entries_.size()) + " entries, more than n+1 = " +
                       std::to_string(n + 1));
  }
  std::size_t successes = 0;
  const ScoredSolution* prev = nullptr;
  for (const auto& [key, e] : entries_) {
    if (key != -e.objectives.f2) problems.push_back("entry keyed " + std::to_string(key) + " has f2 " +
                                                    std::to_string(e.objectives.f2));
    if (e.objectives.success != e.objectives.f1.is_success()) {
      problems.push_back("success flag disagrees with f1 at cardinality " + std::to_string(key));
    }
    if (e.objectives.success) ++successes;
    if (prev && !(prev->objectives.f1 < e.objectives.f1)) {
      problems.push_back("f1 not strictly ascending at cardinality " + std::to_string(key));
    }
    prev = &e;
  }
  for (auto a = entries_.begin(); a != entries_.end(); ++a) {
    for (auto b = entries_.begin(); b != entries_.end(); ++b) {
      if (a != b && weakly_dominates(a->second.objectives, b->second.objectives)) {
        problems.push_back("entry " + std::to_string(a->first) + " weakly dominates entry " +
                           std::to_string(b->first));
      }
    }
  }
  if (successes > 1) problems.push_back("more than one successful entry");
  if (successes == 1 && !entries_.empty() && !best().objectives.success) {
    problems.push_back("successful entry is not the argmax-f1 entry");
  }
  return problems;
}

nlohmann::json Population::to_json(const CandidateSets& sets) const {
  auto arr = nlohmann::json::array();
  for (const auto& [key, e] : entries_) {
    arr.push_back({{"cardinality", key},
                   {"f1", hydra::to_json(e.objectives.f1)},
                   {"f2", e.objectives.f2},
                   {"f3", e.objectives.f3},
                   {"success", e.objectives.success},
                   {"choices", choices_to_json(e.solution, sets)}});
  }
  return arr;
}

}  // namespace hydra
