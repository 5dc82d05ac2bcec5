#include "hydra/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "hydra/error.hpp"

namespace hydra {

EmbeddingTable::EmbeddingTable(std::size_t dimension, std::unordered_map<std::string, std::vector<double>> vectors)
    : dimension_(dimension), vectors_(std::move(vectors)) {
  if (dimension_ == 0) throw Error(ErrorCode::DimensionMismatch, "embedding dimension must be positive");
  for (const auto& [word, v] : vectors_) {
    if (v.size() != dimension_) {
      throw Error(ErrorCode::DimensionMismatch, "vector for '" + word + "' has " + std::to_string(v.size()) +
                                                    " components, expected " + std::to_string(dimension_));
    }
  }
}

EmbeddingTable EmbeddingTable::parse(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorCode::DatasetFormat, "embedding file is empty");
  std::istringstream hs(header);
  long long count = -1;
  long long dim = -1;
  if (!(hs >> count >> dim) || count < 0 || dim <= 0) {
    throw Error(ErrorCode::DatasetFormat, "embedding header must be 'count dim'");
  }
  std::unordered_map<std::string, std::vector<double>> vectors;
  vectors.reserve(static_cast<std::size_t>(count));
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(dim));
    double x = 0.0;
    while (ls >> x) v.push_back(x);
    if (!ls.eof()) {
      throw Error(ErrorCode::DatasetFormat, "bad number on embedding line " + std::to_string(line_no));
    }
    if (v.size() != static_cast<std::size_t>(dim)) {
      throw Error(ErrorCode::DimensionMismatch, "embedding line " + std::to_string(line_no) + " has " +
                                                    std::to_string(v.size()) + " values, expected " +
                                                    std::to_string(dim));
    }
    vectors.insert_or_assign(std::move(word), std::move(v));
  }
  if (vectors.size() != static_cast<std::size_t>(count)) {
    throw Error(ErrorCode::DatasetFormat, "embedding header announces " + std::to_string(count) +
                                              " words, file has " + std::to_string(vectors.size()));
  }
  return EmbeddingTable(static_cast<std::size_t>(dim), std::move(vectors));
}

EmbeddingTable EmbeddingTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::DatasetFormat, "cannot open embeddings " + path);
  return parse(in);
}

const std::vector<double>* EmbeddingTable::find(const std::string& word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<double> EmbeddingTable::embed(const TokenSequence& x) const {
  std::vector<double> sum(dimension_, 0.0);
  if (x.empty()) return sum;
  for (const auto& w : x) {
    if (const auto* v = find(w)) {
      for (std::size_t k = 0; k < dimension_; ++k) sum[k] += (*v)[k];
    }
  }
  const double n = static_cast<double>(x.size());
  for (auto& s : sum) s /= n;
  return sum;
}

EmbeddingTable EmbeddingTable::scaled(double factor) const {
  auto copy = vectors_;
  for (auto& [_, v] : copy) {
    for (auto& x : v) x *= factor;
  }
  return EmbeddingTable(dimension_, std::move(copy));
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "cosine of vectors with lengths " + std::to_string(a.size()) +
                                                  " and " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double EmbeddingSimilarity::similarity(const TokenSequence& a, const TokenSequence& b) const {
  if (a == b) return 1.0;
  const auto ea = table_.embed(a);
  const auto eb = table_.embed(b);
  return cosine_similarity(ea, eb);
}

double TokenOverlapSimilarity::similarity(const TokenSequence& a, const TokenSequence& b) const {
  if (a == b) return 1.0;
  if (a.size() == b.size()) {
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
    return static_cast<double>(same) / static_cast<double>(a.size());
  }
  const std::set<std::string> sa(a.begin(), a.end());
  const std::set<std::string> sb(b.begin(), b.end());
  std::size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace hydra
