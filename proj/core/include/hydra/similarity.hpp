#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hydra/objectives.hpp"

namespace hydra {

/// Static word vectors, all of one dimension.
class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t dimension, std::unordered_map<std::string, std::vector<double>> vectors);

  /// word2vec text format: "count dim" header, then "word v1 ... vdim" lines.
  static EmbeddingTable load(const std::string& path);
  static EmbeddingTable parse(std::istream& in);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  const std::vector<double>* find(const std::string& word) const;

  /// Mean over all n tokens; unknown words count as zero vectors.
  std::vector<double> embed(const TokenSequence& x) const;

  /// Copy with every vector multiplied by `factor`.
  EmbeddingTable scaled(double factor) const;

 private:
  std::size_t dimension_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// dot(a, b) / (|a| |b|), 0 when either norm is zero, clamped to [-1, 1].
/// Throws DimensionMismatch on unequal lengths.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Mean-pooled embedding cosine. Identical token sequences score exactly 1.
class EmbeddingSimilarity final : public SimilarityProvider {
 public:
  explicit EmbeddingSimilarity(EmbeddingTable table) : table_(std::move(table)) {}
  double similarity(const TokenSequence& a, const TokenSequence& b) const override;
  const EmbeddingTable& table() const noexcept { return table_; }

 private:
  EmbeddingTable table_;
};

/// Fallback when no embeddings are available: fraction of aligned positions
/// that agree for equal-length inputs, Jaccard overlap of the word sets
/// otherwise.
class TokenOverlapSimilarity final : public SimilarityProvider {
 public:
  double similarity(const TokenSequence& a, const TokenSequence& b) const override;
};

}  // namespace hydra
