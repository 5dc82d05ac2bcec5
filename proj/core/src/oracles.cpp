#include "hydra/oracles.hpp"

#include <cmath>
#include <fstream>

#include "hydra/error.hpp"

namespace hydra {

double logistic(double s) noexcept { return 1.0 / (1.0 + std::exp(-s)); }

LexiconClassifier::LexiconClassifier(std::unordered_map<std::string, double> weights, QueryMode mode)
    : weights_(std::move(weights)), mode_(mode) {}

LexiconClassifier LexiconClassifier::from_json(const nlohmann::json& j, QueryMode mode) {
  if (!j.is_object() || !j.contains("weights") || !j["weights"].is_object()) {
    throw Error(ErrorCode::DatasetFormat, "lexicon must be an object with a 'weights' object");
  }
  std::unordered_map<std::string, double> weights;
  for (const auto& [word, w] : j["weights"].items()) {
    if (!w.is_number()) throw Error(ErrorCode::DatasetFormat, "lexicon weight for '" + word + "' is not a number");
    weights.emplace(word, w.get<double>());
  }
  return LexiconClassifier(std::move(weights), mode);
}

LexiconClassifier LexiconClassifier::load(const std::string& path, QueryMode mode) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::DatasetFormat, "cannot open lexicon " + path);
  try {
    return from_json(nlohmann::json::parse(in), mode);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::DatasetFormat, path + ": " + e.what());
  }
}

double LexiconClassifier::score(const TokenSequence& text) const {
  double s = 0.0;
  for (const auto& w : text) {
    if (auto it = weights_.find(w); it != weights_.end()) s += it->second;
  }
  return s;
}

Verdict LexiconClassifier::lexicon_classify(const TokenSequence& text) const {
  const double p1 = logistic(score(text));
  return {p1 > 0.5 ? 1 : 0, std::vector<double>{1.0 - p1, p1}};
}

std::vector<Verdict> LexiconClassifier::classify(std::span<const TokenSequence> texts) {
  std::vector<Verdict> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    Verdict v = lexicon_classify(t);
    if (mode_ == QueryMode::Decision) v.probabilities.reset();
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace hydra
