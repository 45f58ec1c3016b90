#pragma once

// Statement-dependency vectors: execution-order (sequence) embeddings, data
// flow (graph) embeddings, their Hadamard product, and coverage-scaled
// tensors built from them.

#include <cstdint>
#include <optional>
#include <vector>

#include "covrank/dataset.hpp"
#include "covrank/embedding.hpp"
#include "covrank/ndarray.hpp"
#include "covrank/rng.hpp"

namespace covrank {

struct WeightedEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  int weight = 1;  // +1 real, -1 artificial reverse edge

  bool operator==(const WeightedEdge&) const = default;
};

struct WeightedDfg {
  std::size_t nodes = 0;
  std::vector<WeightedEdge> edges;  // sorted by (src, dst)

  std::size_t artificial_count() const;
};

/// Real edges get +1; each real (a,b) without a real (b,a) adds (b,a,-1).
WeightedDfg build_weighted_dfg(const std::vector<std::pair<StmtId, StmtId>>& dfg_edges, std::size_t nodes);

/// Statement tokens are stmt ids rendered as decimal strings.
EmbeddingTable train_sequence_embedding(const std::vector<std::vector<StmtId>>& paths, const SgnsConfig& cfg);

struct Node2VecConfig {
  std::size_t walk_len = 10;
  std::size_t walks_per_node = 10;
  double p = 1.0;
  double q = 1.0;
  double artificial_edge_mass = 1.0;
  SgnsConfig sgns;
};

/// Second-order biased walk; edge mass is |weight|, scaled by
/// artificial_edge_mass on artificial edges.
std::vector<std::size_t> node2vec_walk(const WeightedDfg& g, std::size_t start, std::size_t length, double p, double q,
                                       double artificial_edge_mass, Rng& rng);

EmbeddingTable train_graph_embedding(const WeightedDfg& g, const Node2VecConfig& cfg);

/// Per statement: sequence vector .* graph vector, absent rows read as ones.
std::vector<std::vector<double>> statement_dependency_vectors(const EmbeddingTable& seq, const EmbeddingTable& graph,
                                                              std::size_t m);

/// (m, n, d): entry (i, p, :) = ordered cell (i, p) * sd[i].
NdArray combine_with_matrix(const CoverageMatrix& ecc, const std::vector<std::vector<double>>& sd);

/// (m, k, n, d): slab t of statement i scales sd[i] by row i of that
/// statement's t-th mutant matrix, or by the spectrum row when the statement
/// has fewer than k mutants. k defaults to the largest per-statement mutant
/// count; extra mutants beyond an explicit k are dropped.
NdArray combine_mutation(const std::vector<MutationMatrix>& mbm, const CoverageMatrix& spectrum,
                         const std::vector<std::vector<double>>& sd, std::optional<std::size_t> k = std::nullopt);

}  // namespace covrank
