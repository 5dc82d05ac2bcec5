#pragma once

// Shared test fixtures: the four-word toy instance, small oracles, and a
// direct transcription of the dominance definitions that does not go through
// the library's F1Value ordering.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "hydra/engine.hpp"
#include "hydra/objectives.hpp"
#include "hydra/oracles.hpp"
#include "hydra/search_space.hpp"
#include "hydra/similarity.hpp"

namespace hydra::testing {

/// x = "the movie is good", B_2 = {film, flick}, B_4 = {fine, nice}
/// (zero-based positions 1 and 3).
inline TokenSequence toy_tokens() { return TokenSequence({"the", "movie", "is", "good"}); }

inline CandidateSets toy_sets() {
  return CandidateSets(toy_tokens(), {{}, {"film", "flick"}, {}, {"fine", "nice"}});
}

/// Weights under which no single substitution flips the positive label but
/// three of the four pairs do.
inline LexiconClassifier toy_lexicon(QueryMode mode = QueryMode::Score) {
  return LexiconClassifier({{"good", 2.0}, {"film", -1.2}, {"flick", -0.4}, {"fine", 0.9}, {"nice", 0.3}}, mode);
}

/// good -> (1,0), nice -> (0.8,0.6); other words unknown.
inline EmbeddingTable toy_embeddings() {
  return EmbeddingTable(2, {{"good", {1.0, 0.0}}, {"nice", {0.8, 0.6}}});
}

/// Counts calls and texts on top of another oracle.
class CountingOracle final : public VictimOracle {
 public:
  explicit CountingOracle(VictimOracle& inner) : inner_(inner) {}
  QueryMode mode() const override { return inner_.mode(); }
  int num_classes() const override { return inner_.num_classes(); }
  std::vector<Verdict> classify(std::span<const TokenSequence> texts) override {
    ++calls;
    texts_seen += texts.size();
    for (const auto& t : texts) seen.push_back(t.join());
    return inner_.classify(texts);
  }

  std::size_t calls = 0;
  std::size_t texts_seen = 0;
  std::vector<std::string> seen;

 private:
  VictimOracle& inner_;
};

/// Bag-of-words softmax model over any number of classes; ties go to the
/// lowest class index.
class SoftmaxLexicon final : public VictimOracle {
 public:
  SoftmaxLexicon(int classes, std::unordered_map<std::string, std::vector<double>> weights, QueryMode mode)
      : classes_(classes), weights_(std::move(weights)), mode_(mode) {}

  QueryMode mode() const override { return mode_; }
  int num_classes() const override { return classes_; }

  std::vector<Verdict> classify(std::span<const TokenSequence> texts) override {
    std::vector<Verdict> out;
    for (const auto& t : texts) {
      std::vector<double> logits(classes_, 0.0);
      for (const auto& w : t) {
        if (auto it = weights_.find(w); it != weights_.end()) {
          for (int k = 0; k < classes_; ++k) logits[k] += it->second[k];
        }
      }
      double mx = logits[0];
      for (double l : logits) mx = std::max(mx, l);
      double z = 0.0;
      for (auto& l : logits) z += (l = std::exp(l - mx));
      int best = 0;
      for (int k = 0; k < classes_; ++k) {
        logits[k] /= z;
        if (logits[k] > logits[best]) best = k;
      }
      Verdict v{best, logits};
      if (mode_ == QueryMode::Decision) v.probabilities.reset();
      out.push_back(std::move(v));
    }
    return out;
  }

 private:
  int classes_;
  std::unordered_map<std::string, std::vector<double>> weights_;
  QueryMode mode_;
};

// --- direct transcription of weak domination / domination ------------------

struct RawVector {
  bool success = false;
  double value = 0.0;
  int f2 = 0;
  double f3 = 0.0;
};

inline RawVector raw(const ObjectiveVector& v) {
  return {v.f1.is_success(), v.f1.is_success() ? 0.0 : v.f1.value(), v.f2, v.f3};
}

inline bool raw_f1_ge(const RawVector& a, const RawVector& b) { return a.success || (!b.success && a.value >= b.value); }
inline bool raw_f1_gt(const RawVector& a, const RawVector& b) {
  return (a.success && !b.success) || (!a.success && !b.success && a.value > b.value);
}
inline bool raw_f1_eq(const RawVector& a, const RawVector& b) {
  return (a.success && b.success) || (!a.success && !b.success && a.value == b.value);
}
inline bool raw_weak(const RawVector& a, const RawVector& b) { return raw_f1_ge(a, b) && a.f2 >= b.f2; }
inline bool raw_dom(const RawVector& a, const RawVector& b) {
  const bool case1 = raw_weak(a, b) && (raw_f1_gt(a, b) || a.f2 > b.f2);
  const bool case2 = raw_f1_eq(a, b) && a.f2 == b.f2 && a.f3 > b.f3;
  return case1 || case2;
}

/// Small value pools so that exact ties happen often.
inline ObjectiveVector random_vector(std::mt19937_64& rng, int max_cardinality = 8) {
  static constexpr std::array<double, 6> kF1 = {0.0, 0.1, 0.25, 0.5, 0.75, 0.9};
  static constexpr std::array<double, 5> kF3 = {0.2, 0.4, 0.6, 0.8, 1.0};
  std::uniform_int_distribution<int> f1_pick(0, static_cast<int>(kF1.size()));  // last = Success
  std::uniform_int_distribution<int> card(0, max_cardinality);
  std::uniform_int_distribution<int> f3_pick(0, static_cast<int>(kF3.size()) - 1);
  const int k = f1_pick(rng);
  const F1Value f1 = k == static_cast<int>(kF1.size()) ? F1Value::success() : F1Value::real(kF1[k]);
  return ObjectiveVector::make(f1, -card(rng), kF3[f3_pick(rng)]);
}

/// Random instance whose lexicon classifies the original as its label.
struct RandomProblem {
  AttackInstance instance;
  LexiconClassifier oracle;
};

inline RandomProblem random_problem(std::mt19937_64& rng, std::size_t max_space = 10000) {
  std::uniform_int_distribution<int> len(3, 7);
  std::uniform_int_distribution<int> vocab(0, 24);
  std::uniform_int_distribution<int> cand_count(0, 3);
  std::normal_distribution<double> weight(0.0, 1.2);

  std::unordered_map<std::string, double> weights;
  for (int w = 0; w < 25; ++w) weights["w" + std::to_string(w)] = weight(rng);

  for (;;) {
    const int n = len(rng);
    std::vector<std::string> tokens;
    for (int i = 0; i < n; ++i) tokens.push_back("w" + std::to_string(vocab(rng)));
    std::vector<std::vector<std::string>> cands(n);
    double space = 1.0;
    for (int i = 0; i < n; ++i) {
      const int k = cand_count(rng);
      for (int j = 0; j < k * 4 && static_cast<int>(cands[i].size()) < k; ++j) {
        std::string w = "w" + std::to_string(vocab(rng));
        if (w == tokens[i] || std::find(cands[i].begin(), cands[i].end(), w) != cands[i].end()) continue;
        cands[i].push_back(w);
      }
      space *= static_cast<double>(cands[i].size() + 1);
    }
    if (space > static_cast<double>(max_space) || space < 2.0) continue;
    TokenSequence x(tokens);
    LexiconClassifier oracle(weights);
    const int label = oracle.lexicon_classify(x).label;
    AttackInstance inst{"random", x, label, CandidateSets(x, cands)};
    return {std::move(inst), std::move(oracle)};
  }
}

}  // namespace hydra::testing
