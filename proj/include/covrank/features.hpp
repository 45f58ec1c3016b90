#pragma once

// Network inputs derived from a dataset without looking at fault labels:
// enhanced coverage tensors, mutation tensors, token and path matrices, and
// TF-IDF similarity vectors, padded or truncated to fixed extents.

#include <cstdint>
#include <vector>

#include "covrank/code_repr.hpp"
#include "covrank/dataset.hpp"
#include "covrank/dep_embed.hpp"
#include "covrank/ee_matrix.hpp"
#include "covrank/ndarray.hpp"

namespace covrank {

/// Outer product of k >= 2 vectors: entry (i1..ik) = v1[i1] * ... * vk[ik].
NdArray broadcast_hadamard(const std::vector<std::vector<double>>& vs);

struct Toggles {
  bool ordering = true;
  bool ee_marks = true;
  bool stat_dep = true;
  bool mutation = true;
  bool code_rep = true;
  bool text_sim = true;

  bool operator==(const Toggles&) const = default;
};

struct FeatureConfig {
  Toggles toggles;
  EeMode ee_mode = EeMode::cell;
  std::size_t tests = 12;     // N: test columns kept (display order)
  std::size_t stmts = 16;     // M: statement rows kept at method level
  std::size_t mutants = 3;    // K: mutant slabs per statement
  std::size_t dim = 8;        // statement-dependency embedding width
  std::size_t token_dim = 8;  // token / AST node embedding width
  std::size_t token_window = kTokenWindow;
  std::size_t path_len = kMaxPathLen;
  std::size_t max_paths = kMaxPaths;
  SgnsConfig sgns;            // dim is overridden per table
  Node2VecConfig node2vec;
  bool standardize = true;    // per-tensor standardization of channel inputs
  std::uint64_t seed = 0;
};

struct MethodFeatures {
  std::string method_id;
  bool faulty = false;
  std::size_t statements = 0;
  std::vector<bool> faulty_stmt;
  CoverageMatrix ecc;                // enhanced (marked, ordered) spectrum matrix
  std::vector<double> ochiai;        // baseline scores on the raw matrix
  std::vector<double> dstar;
  std::vector<NdArray> x_ss;         // (1, N, d) per statement
  std::vector<NdArray> x_ms;         // (K, N, d) per statement; empty without mutants
  std::vector<NdArray> x_cs;         // (T, token_dim) per statement
  NdArray x_sm;                      // (d, M, N)
  NdArray x_mm;                      // (d, K, M, N); empty without mutants
  NdArray x_cm;                      // (path_len, token_dim)
  SimilarityVector sim{};
};

struct BugFeatures {
  std::string bug_id;
  bool tie_heavy = false;
  std::vector<MethodFeatures> methods;
};

struct ProjectFeatures {
  std::string project;
  std::vector<BugFeatures> bugs;
};

/// Label-free per-project tables.
struct ProjectTables {
  EmbeddingTable tokens;
  EmbeddingTable nodes;
  TfidfCorpus corpus;
};

ProjectTables build_project_tables(const ProjectDataset& project, const FeatureConfig& cfg);

/// Enhanced matrix of a method under the configured toggles.
CoverageMatrix enhanced_matrix(const MethodRecord& method, const FeatureConfig& cfg);

/// Mutation matrices with EE marks and the spectrum column order applied.
std::vector<MutationMatrix> enhanced_mutation_matrices(const MethodRecord& method, const CoverageMatrix& ecc,
                                                       const FeatureConfig& cfg);

/// Statement-dependency vectors of a method (all ones when stat_dep is off).
std::vector<std::vector<double>> method_dependency_vectors(const MethodRecord& method, const std::string& bug_id,
                                                           const FeatureConfig& cfg);

MethodFeatures build_method_features(const BugRecord& bug, const MethodRecord& method, const ProjectTables& tables,
                                     const FeatureConfig& cfg);

/// Features of every bug; projects are processed on up to `threads` workers.
std::vector<ProjectFeatures> build_features(const std::vector<ProjectDataset>& projects, const FeatureConfig& cfg,
                                            std::size_t threads = 1);

}  // namespace covrank
