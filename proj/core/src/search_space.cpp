#include "hydra/search_space.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "hydra/error.hpp"

namespace hydra {

namespace {

bool has_space(std::string_view word) {
  return std::any_of(word.begin(), word.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::uint64_t mix(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t draw_index(Rng& rng, std::size_t count) {
  std::uniform_int_distribution<std::size_t> dist(0, count - 1);
  return dist(rng);
}

}  // namespace

// ---------------------------------------------------------------------------
// TokenSequence

TokenSequence::TokenSequence(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (const auto& w : tokens_) {
    if (w.empty() || has_space(w)) {
      throw Error(ErrorCode::InvalidInstance, "token must be a non-empty word without whitespace: '" + w + "'");
    }
  }
}

TokenSequence TokenSequence::parse(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) out.push_back(word);
  return TokenSequence(std::move(out));
}

std::string TokenSequence::join() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens_[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// CandidateSets

CandidateSets::CandidateSets(const TokenSequence& original, std::vector<std::vector<std::string>> per_position)
    : per_position_(std::move(per_position)) {
  if (per_position_.size() != original.size()) {
    throw Error(ErrorCode::InvalidInstance, "candidate list count " + std::to_string(per_position_.size()) +
                                                " does not match token count " + std::to_string(original.size()));
  }
  for (std::size_t i = 0; i < per_position_.size(); ++i) {
    std::unordered_set<std::string_view> seen;
    for (const auto& w : per_position_[i]) {
      if (w.empty() || has_space(w)) {
        throw Error(ErrorCode::InvalidInstance, "candidate at position " + std::to_string(i) + " is not a word");
      }
      if (w == original[i]) {
        throw Error(ErrorCode::InvalidInstance,
                    "candidate '" + w + "' at position " + std::to_string(i) + " equals the original word");
      }
      if (!seen.insert(w).second) {
        throw Error(ErrorCode::InvalidInstance,
                    "duplicate candidate '" + w + "' at position " + std::to_string(i));
      }
    }
  }
}

std::optional<std::uint32_t> CandidateSets::find(std::size_t position, std::string_view word) const {
  if (position >= per_position_.size()) return std::nullopt;
  const auto& list = per_position_[position];
  auto it = std::find(list.begin(), list.end(), word);
  if (it == list.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - list.begin());
}

std::size_t CandidateSets::item_count() const noexcept {
  return std::accumulate(per_position_.begin(), per_position_.end(), std::size_t{0},
                         [](std::size_t acc, const auto& l) { return acc + l.size(); });
}

double CandidateSets::search_space_size() const noexcept {
  double total = 1.0;
  for (const auto& l : per_position_) total *= static_cast<double>(l.size() + 1);
  return total;
}

// ---------------------------------------------------------------------------
// Solution

Solution Solution::from_choices(std::vector<Choice> choices) {
  std::sort(choices.begin(), choices.end());
  for (std::size_t i = 1; i < choices.size(); ++i) {
    if (choices[i].position == choices[i - 1].position) {
      throw Error(ErrorCode::InfeasibleSolution,
                  "more than one substitute at position " + std::to_string(choices[i].position));
    }
  }
  return Solution(std::move(choices));
}

Solution Solution::from_words(const CandidateSets& sets,
                              std::span<const std::pair<std::size_t, std::string>> words) {
  std::vector<Choice> choices;
  choices.reserve(words.size());
  for (const auto& [pos, word] : words) {
    auto idx = sets.find(pos, word);
    if (!idx) {
      throw Error(ErrorCode::InfeasibleSolution,
                  "'" + word + "' is not a candidate at position " + std::to_string(pos));
    }
    choices.push_back({static_cast<std::uint32_t>(pos), *idx});
  }
  return from_choices(std::move(choices));
}

std::optional<std::uint32_t> Solution::candidate_at(std::size_t position) const {
  auto it = std::lower_bound(choices_.begin(), choices_.end(), position,
                             [](const Choice& c, std::size_t p) { return c.position < p; });
  if (it == choices_.end() || it->position != position) return std::nullopt;
  return it->candidate;
}

Solution Solution::with(std::uint32_t position, std::uint32_t candidate) const {
  std::vector<Choice> next = choices_;
  auto it = std::lower_bound(next.begin(), next.end(), position,
                             [](const Choice& c, std::uint32_t p) { return c.position < p; });
  if (it != next.end() && it->position == position) {
    it->candidate = candidate;
  } else {
    next.insert(it, Choice{position, candidate});
  }
  return Solution(std::move(next));
}

Solution Solution::without(std::uint32_t position) const {
  std::vector<Choice> next;
  next.reserve(choices_.size());
  for (const auto& c : choices_) {
    if (c.position != position) next.push_back(c);
  }
  return Solution(std::move(next));
}

bool Solution::is_feasible(const CandidateSets& sets) const noexcept {
  for (std::size_t i = 0; i < choices_.size(); ++i) {
    const auto& c = choices_[i];
    if (c.position >= sets.size() || c.candidate >= sets.count(c.position)) return false;
    if (i && choices_[i - 1].position == c.position) return false;
  }
  return true;
}

void Solution::check_feasible(const CandidateSets& sets) const {
  for (const auto& c : choices_) {
    if (c.position >= sets.size()) {
      throw Error(ErrorCode::InfeasibleSolution, "position " + std::to_string(c.position) + " out of range");
    }
    if (c.candidate >= sets.count(c.position)) {
      throw Error(ErrorCode::InfeasibleSolution, "candidate " + std::to_string(c.candidate) +
                                                     " not in B_" + std::to_string(c.position));
    }
  }
  if (!is_feasible(sets)) throw Error(ErrorCode::InfeasibleSolution, "repeated position");
}

std::uint64_t Solution::hash() const noexcept {
  std::uint64_t h = mix(choices_.size());
  for (const auto& c : choices_) {
    h = mix(h ^ ((static_cast<std::uint64_t>(c.position) << 32) | c.candidate));
  }
  return h;
}

bool is_neighbor(const Solution& a, const Solution& b) noexcept {
  auto ca = a.choices();
  auto cb = b.choices();
  std::size_t i = 0, j = 0, diff = 0;
  while (i < ca.size() || j < cb.size()) {
    if (j == cb.size() || (i < ca.size() && ca[i].position < cb[j].position)) {
      ++diff;
      ++i;
    } else if (i == ca.size() || cb[j].position < ca[i].position) {
      ++diff;
      ++j;
    } else {
      if (ca[i].candidate != cb[j].candidate) ++diff;
      ++i;
      ++j;
    }
    if (diff > 1) return false;
  }
  return diff == 1;
}

// ---------------------------------------------------------------------------
// Variations

Solution apply_variation(const Solution& s, const Variation& v, const CandidateSets& sets) {
  if (v.position >= sets.size()) {
    throw Error(ErrorCode::InfeasibleSolution, "variation position out of range");
  }
  auto current = s.candidate_at(v.position);
  switch (v.kind) {
    case VariationKind::Insertion:
      if (current || !v.candidate || *v.candidate >= sets.count(v.position)) {
        throw Error(ErrorCode::InfeasibleSolution, "illegal insertion");
      }
      return s.with(v.position, *v.candidate);
    case VariationKind::Deletion:
      if (!current) throw Error(ErrorCode::InfeasibleSolution, "illegal deletion");
      return s.without(v.position);
    case VariationKind::Exchange:
      if (!current || !v.candidate || *v.candidate == *current || *v.candidate >= sets.count(v.position)) {
        throw Error(ErrorCode::InfeasibleSolution, "illegal exchange");
      }
      return s.with(v.position, *v.candidate);
  }
  return s;
}

TokenSequence apply_solution(const TokenSequence& original, const CandidateSets& sets, const Solution& s) {
  if (sets.size() != original.size()) {
    throw Error(ErrorCode::InfeasibleSolution, "candidate sets do not match the input length");
  }
  s.check_feasible(sets);
  std::vector<std::string> out = original.tokens();
  for (const auto& c : s.choices()) out[c.position] = sets.word(c.position, c.candidate);
  return TokenSequence(std::move(out));
}

double modification_rate(const Solution& s, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidInstance, "modification rate of an empty input");
  return static_cast<double>(s.cardinality()) / static_cast<double>(n);
}

namespace {

struct MoveCounts {
  std::size_t insertion = 0;
  std::size_t deletion = 0;
  std::size_t exchange = 0;
};

MoveCounts count_moves(const Solution& s, const CandidateSets& sets) {
  MoveCounts m;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const std::size_t k = sets.count(i);
    if (s.is_mapped(i)) {
      ++m.deletion;
      m.exchange += k - 1;
    } else {
      m.insertion += k;
    }
  }
  return m;
}

}  // namespace

std::vector<Variation> sample_variations(const Solution& s, const CandidateSets& sets, Rng& rng) {
  const MoveCounts moves = count_moves(s, sets);
  std::vector<Variation> out;
  out.reserve(3);

  if (moves.insertion > 0) {
    std::size_t k = draw_index(rng, moves.insertion);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (s.is_mapped(i)) continue;
      const std::size_t c = sets.count(i);
      if (k < c) {
        out.push_back({VariationKind::Insertion, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k)});
        break;
      }
      k -= c;
    }
  }
  if (moves.deletion > 0) {
    const auto& chosen = s.choices()[draw_index(rng, moves.deletion)];
    out.push_back({VariationKind::Deletion, chosen.position, std::nullopt});
  }
  if (moves.exchange > 0) {
    std::size_t k = draw_index(rng, moves.exchange);
    for (const auto& c : s.choices()) {
      const std::size_t others = sets.count(c.position) - 1;
      if (k < others) {
        auto pick = static_cast<std::uint32_t>(k);
        if (pick >= c.candidate) ++pick;
        out.push_back({VariationKind::Exchange, c.position, pick});
        break;
      }
      k -= others;
    }
  }
  return out;
}

std::vector<Solution> sample_variation(const Solution& s, const CandidateSets& sets, Rng& rng) {
  std::vector<Solution> out;
  for (const auto& v : sample_variations(s, sets, rng)) out.push_back(apply_variation(s, v, sets));
  return out;
}

std::size_t neighborhood_size(const Solution& s, const CandidateSets& sets) {
  const MoveCounts m = count_moves(s, sets);
  return m.insertion + m.deletion + m.exchange;
}

std::vector<Solution> enumerate_neighbors(const Solution& s, const CandidateSets& sets) {
  s.check_feasible(sets);
  std::vector<Solution> out;
  out.reserve(neighborhood_size(s, sets));
  for (std::uint32_t i = 0; i < sets.size(); ++i) {
    if (s.is_mapped(i)) continue;
    for (std::uint32_t c = 0; c < sets.count(i); ++c) out.push_back(s.with(i, c));
  }
  for (const auto& c : s.choices()) out.push_back(s.without(c.position));
  for (const auto& c : s.choices()) {
    for (std::uint32_t k = 0; k < sets.count(c.position); ++k) {
      if (k != c.candidate) out.push_back(s.with(c.position, k));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instance files

AttackInstance parse_instance(const nlohmann::json& j, std::string default_id) {
  if (!j.is_object()) throw Error(ErrorCode::DatasetFormat, "attack instance must be a JSON object");
  for (const char* key : {"tokens", "label", "candidates"}) {
    if (!j.contains(key)) throw Error(ErrorCode::DatasetFormat, std::string("attack instance missing '") + key + "'");
  }
  AttackInstance inst;
  try {
    inst.id = j.contains("id") ? (j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump())
                               : std::move(default_id);
    inst.tokens = TokenSequence(j.at("tokens").get<std::vector<std::string>>());
    inst.label = j.at("label").get<int>();
    inst.candidates = CandidateSets(inst.tokens, j.at("candidates").get<std::vector<std::vector<std::string>>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::DatasetFormat, e.what());
  }
  if (inst.tokens.empty()) throw Error(ErrorCode::InvalidInstance, "attack instance has no tokens");
  if (inst.label < 0) throw Error(ErrorCode::InvalidLabel, "negative label");
  return inst;
}

nlohmann::json to_json(const AttackInstance& instance) {
  nlohmann::json j;
  if (!instance.id.empty()) j["id"] = instance.id;
  j["tokens"] = instance.tokens.tokens();
  j["label"] = instance.label;
  j["candidates"] = instance.candidates.lists();
  return j;
}

AttackInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::DatasetFormat, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::DatasetFormat, path + ": " + e.what());
  }
  return parse_instance(j, path);
}

nlohmann::json choices_to_json(const Solution& s, const CandidateSets& sets) {
  auto arr = nlohmann::json::array();
  for (const auto& c : s.choices()) {
    arr.push_back({{"position", c.position}, {"word", sets.word(c.position, c.candidate)}});
  }
  return arr;
}

}  // namespace hydra
