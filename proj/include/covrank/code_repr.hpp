#pragma once

// Static code representations: statement token windows, AST long paths,
// and TF-IDF similarity between failing tests and methods.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "covrank/dataset.hpp"
#include "covrank/embedding.hpp"
#include "covrank/nn.hpp"

namespace covrank {

inline constexpr std::size_t kTokenWindow = 16;
inline constexpr std::size_t kMaxPaths = 64;
inline constexpr std::size_t kMaxPathLen = 16;

/// Identifiers, numbers, multi-character operators, then single characters.
std::vector<std::string> tokenize_statement(const std::string& text);

/// (window, dim) token matrix: embedded tokens, zero rows as padding.
NdArray token_matrix(const std::vector<std::string>& tokens, const EmbeddingTable& table,
                     std::size_t window = kTokenWindow);

/// Flattened token matrix reduced by a dense layer (in = window * dim).
std::vector<double> statement_vector(const std::vector<std::string>& tokens, const EmbeddingTable& table,
                                     const FcLayer& reducer, std::size_t window = kTokenWindow);

struct LongPath {
  std::vector<const AstNode*> nodes;
  std::size_t first_leaf = 0;  // preorder leaf indices of the endpoints
  std::size_t last_leaf = 0;
};

/// Node used as the path apex: the root, or the highest descendant with at
/// least two children when the root has a single child.
const AstNode& path_apex(const AstNode& root);

/// Leaf-to-leaf paths through the apex, ordered by (first_leaf, last_leaf);
/// paths with more than max_len nodes are dropped, then the list is cut to
/// max_paths.
std::vector<LongPath> extract_long_paths(const AstNode& ast, std::size_t max_paths = kMaxPaths,
                                         std::size_t max_len = kMaxPathLen);

/// Node token: lexeme for leaves, kind for internal nodes.
std::string node_token(const AstNode& n);
std::vector<std::string> path_tokens(const LongPath& p);

/// Mean over paths of the (max_len, dim) node-vector matrix.
NdArray path_bag_matrix(const std::vector<LongPath>& paths, const EmbeddingTable& table,
                        std::size_t max_len = kMaxPathLen);

std::vector<double> method_code_vector(const std::vector<LongPath>& paths, const EmbeddingTable& table,
                                       const FcLayer& reducer, std::size_t max_len = kMaxPathLen);

// TF-IDF

/// Lowercased alphanumeric runs.
std::vector<std::string> text_tokens(const std::string& text);

class TfidfCorpus {
 public:
  TfidfCorpus() = default;
  explicit TfidfCorpus(const std::vector<std::string>& documents);

  /// tf = 1 + ln(count), idf = ln((1 + N) / (1 + df)) + 1.
  std::map<std::string, double> vectorize(const std::string& document) const;
  /// Cosine of the two TF-IDF vectors, clipped to [0, 1]; 0 for empty input.
  double similarity(const std::string& a, const std::string& b) const;

  std::size_t documents() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::map<std::string, std::size_t> df_;
};

/// Facet documents of a project: three per bug and five per method.
std::vector<std::string> project_documents(const ProjectDataset& project);

using SimilarityVector = std::array<double, 15>;

/// Order: test facets (names, source, messages) outer, code facets
/// (qualified_name, accessed_classes, invocations, variables, comments) inner.
SimilarityVector tfidf_similarity(const FailingTestFacets& tests, const MethodFacets& method,
                                  const TfidfCorpus& corpus);

}  // namespace covrank
