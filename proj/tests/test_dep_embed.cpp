#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "covrank/dep_embed.hpp"
#include "covrank/error.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

using namespace covrank;

std::vector<std::vector<double>> random_sd(Rng& rng, std::size_t m, std::size_t d) {
  std::vector<std::vector<double>> sd(m, std::vector<double>(d));
  for (auto& v : sd)
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return sd;
}

TEST(WeightedDfg, ComputeFixture) {
  const auto dfg = mini::build_dfg(fixtures::compute_program());
  const auto g = build_weighted_dfg(dfg, 10);
  EXPECT_EQ(g.nodes, 10u);
  EXPECT_EQ(g.artificial_count(), dfg.size());
  EXPECT_EQ(g.edges.size(), 2 * dfg.size());
  const WeightedEdge rev{3, 0, -1};
  EXPECT_NE(std::find(g.edges.begin(), g.edges.end(), rev), g.edges.end());
}

TEST(WeightedDfg, ArtificialCountIsRealMinusMutualPairs) {
  Rng rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng.below(10);
    std::set<std::pair<StmtId, StmtId>> es;
    for (std::size_t k = 0; k < 2 * n; ++k) {
      const auto a = rng.below(n), b = rng.below(n);
      if (a != b) es.insert({a, b});
    }
    const std::vector<std::pair<StmtId, StmtId>> edges(es.begin(), es.end());
    std::size_t mutual = 0;
    for (auto [a, b] : edges) mutual += es.count({b, a});
    const auto g = build_weighted_dfg(edges, n);
    EXPECT_EQ(g.artificial_count(), edges.size() - mutual);
    EXPECT_TRUE(std::is_sorted(g.edges.begin(), g.edges.end(), [](const auto& x, const auto& y) {
      return std::pair(x.src, x.dst) < std::pair(y.src, y.dst);
    }));
    for (const auto& e : g.edges) EXPECT_EQ(e.weight == 1, es.count({e.src, e.dst}) == 1);
  }
}

TEST(Node2Vec, WalksFollowEdges) {
  const auto g = build_weighted_dfg(mini::build_dfg(fixtures::compute_program()), 10);
  std::set<std::pair<std::size_t, std::size_t>> adj;
  for (const auto& e : g.edges) adj.insert({e.src, e.dst});
  Rng rng(8);
  for (std::size_t s = 0; s < 10; ++s) {
    const auto w = node2vec_walk(g, s, 12, 1.0, 0.5, 1.0, rng);
    ASSERT_FALSE(w.empty());
    EXPECT_EQ(w.front(), s);
    EXPECT_LE(w.size(), 12u);
    for (std::size_t k = 1; k < w.size(); ++k) EXPECT_TRUE(adj.count({w[k - 1], w[k]}));
  }
}

TEST(Node2Vec, ZeroArtificialMassUsesOnlyRealEdges) {
  const auto dfg = mini::build_dfg(fixtures::compute_program());
  const auto g = build_weighted_dfg(dfg, 10);
  const std::set<std::pair<StmtId, StmtId>> real(dfg.begin(), dfg.end());
  Rng rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    const auto w = node2vec_walk(g, 0, 8, 1.0, 1.0, 0.0, rng);
    for (std::size_t k = 1; k < w.size(); ++k) EXPECT_TRUE(real.count({w[k - 1], w[k]}));
  }
}

TEST(DependencyVectors, HadamardOfBothEmbeddings) {
  EmbeddingTable seq{2, {{"0", {1.0, 2.0}}, {"1", {3.0, -1.0}}}};
  EmbeddingTable graph{2, {{"0", {0.5, 0.5}}, {"2", {2.0, 2.0}}}};
  const auto sd = statement_dependency_vectors(seq, graph, 3);
  ASSERT_EQ(sd.size(), 3u);
  EXPECT_EQ(sd[0], (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(sd[1], (std::vector<double>{3.0, -1.0}));
  EXPECT_EQ(sd[2], (std::vector<double>{2.0, 2.0}));
  EXPECT_EQ(statement_dependency_vectors(graph, seq, 3), sd);
}

TEST(DependencyVectors, TrainedTablesCoverEveryStatement) {
  const auto m = fixtures::join_method();
  std::vector<std::vector<StmtId>> paths;
  for (const auto& t : m.tests)
    if (!t.exec_path.empty()) paths.push_back(t.exec_path);
  SgnsConfig cfg;
  cfg.dim = 4;
  const auto seq = train_sequence_embedding(paths, cfg);
  EXPECT_TRUE(seq.contains("0"));
  EXPECT_FALSE(seq.contains("1"));  // never executed
  Node2VecConfig ncfg;
  ncfg.sgns.dim = 4;
  const auto graph = train_graph_embedding(build_weighted_dfg({{0, 2}, {2, 3}}, 12), ncfg);
  const auto sd = statement_dependency_vectors(seq, graph, 12);
  EXPECT_EQ(sd[1], graph.lookup("1"));
}

TEST(Combine, MatchesCellwiseOracle) {
  Rng rng(12);
  for (int rep = 0; rep < 50; ++rep) {
    const auto m = 1 + rng.below(8), n = 1 + rng.below(8), d = 1 + rng.below(5);
    auto mx = oracle::random_ee_matrix(rng, m, n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    mx.col_order = perm;
    const auto sd = random_sd(rng, m, d);
    const auto t = combine_with_matrix(mx, sd);
    ASSERT_EQ(t.shape(), (Shape{m, n, d}));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t c = 0; c < d; ++c) EXPECT_EQ(t.at(i, p, c), mx.ordered(i, p) * sd[i][c]);
  }
}

TEST(Combine, EeCellNegatesTheVector) {
  Rng rng(2);
  CoverageMatrix mx(2, 2);
  mx.at(0, 0) = 1;
  mx.at(0, 1) = -1;
  const auto sd = random_sd(rng, 2, 3);
  const auto t = combine_with_matrix(mx, sd);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(t.at(0, 1, c), -t.at(0, 0, c));
    EXPECT_EQ(t.at(1, 0, c), 0.0);
  }
}

TEST(CombineMutation, PadsWithTheSpectrumRow) {
  Rng rng(6);
  const std::size_t m = 3, n = 4, d = 2;
  CoverageMatrix spec(m, n);
  for (auto& v : spec.cells) v = rng.chance(0.5);
  spec.col_order = {3, 1, 0, 2};
  std::vector<MutationMatrix> mbm;
  for (auto [id, stmt] : std::vector<std::pair<const char*, StmtId>>{{"m0", 0}, {"m1", 0}, {"m2", 2}}) {
    MutationMatrix mm{id, stmt, CoverageMatrix(m, n, MatrixKind::mutation)};
    for (auto& v : mm.matrix.cells) v = rng.chance(0.5) ? (rng.chance(0.3) ? -1 : 1) : 0;
    mm.matrix.col_order = spec.col_order;
    mbm.push_back(mm);
  }
  const auto sd = random_sd(rng, m, d);
  const auto t = combine_mutation(mbm, spec, sd);
  ASSERT_EQ(t.shape(), (Shape{m, 2, n, d}));
  auto src = [&](std::size_t i, std::size_t k) -> const CoverageMatrix& {
    if (i == 0) return mbm[k].matrix;
    if (i == 2 && k == 0) return mbm[2].matrix;
    return spec;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t c = 0; c < d; ++c) EXPECT_EQ(t.at(i, k, p, c), src(i, k).ordered(i, p) * sd[i][c]);

  const auto t1 = combine_mutation(mbm, spec, sd, 1);
  EXPECT_EQ(t1.shape(), (Shape{m, 1, n, d}));
  const auto t3 = combine_mutation(mbm, spec, sd, 3);
  for (std::size_t p = 0; p < n; ++p) EXPECT_EQ(t3.at(0, 2, p, 0), spec.ordered(0, p) * sd[0][0]);
}

TEST(CombineMutation, RejectsBadInput) {
  CoverageMatrix spec(2, 2);
  EXPECT_THROW(combine_mutation({}, spec, {{1.0}, {1.0}}), Error);
  std::vector<MutationMatrix> mbm = {{"m", 5, CoverageMatrix(2, 2)}};
  EXPECT_THROW(combine_mutation(mbm, spec, {{1.0}, {1.0}}), Error);
}

}  // namespace
