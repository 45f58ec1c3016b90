#pragma once

// Skip-gram with negative sampling over integer token streams.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace covrank {

struct SgnsConfig {
  std::size_t dim = 16;
  std::size_t window = 2;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double lr = 0.025;
  std::uint64_t seed = 0;
};

struct SgnsModel {
  std::size_t dim = 0;
  std::vector<std::vector<double>> input;   // per token
  std::vector<std::vector<double>> output;  // per token
  std::vector<std::size_t> frequency;

  /// input + output, the vector exported for a token.
  std::vector<double> vector_of(std::size_t token) const;
};

/// Tokens are 0..vocab-1. Input vectors start uniform in [-0.5/d, 0.5/d],
/// output vectors at zero; negatives are drawn from unigram^0.75; the
/// learning rate decays linearly over all training pairs.
SgnsModel train_sgns(const std::vector<std::vector<std::size_t>>& corpus, std::size_t vocab, const SgnsConfig& cfg);

/// Token -> vector map. Lookups of absent tokens return the all-ones vector.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::map<std::string, std::vector<double>> vectors;

  bool contains(const std::string& token) const { return vectors.count(token) != 0; }
  std::vector<double> lookup(const std::string& token) const;
  std::string to_csv() const;

  bool operator==(const EmbeddingTable&) const = default;
};

/// Trains over string sentences; every token seen in the corpus gets a row.
EmbeddingTable train_token_embedding(const std::vector<std::vector<std::string>>& sentences, const SgnsConfig& cfg);

double cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace covrank
