#include "covrank/dep_embed.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "covrank/error.hpp"

namespace covrank {

std::size_t WeightedDfg::artificial_count() const {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [](const auto& e) { return e.weight < 0; }));
}

WeightedDfg build_weighted_dfg(const std::vector<std::pair<StmtId, StmtId>>& dfg_edges, std::size_t nodes) {
  std::set<std::pair<StmtId, StmtId>> real(dfg_edges.begin(), dfg_edges.end());
  WeightedDfg g;
  g.nodes = nodes;
  for (const auto& [a, b] : real) {
    if (a >= nodes || b >= nodes) fail(ErrorKind::data, "dfg edge outside the statement range");
    g.edges.push_back({a, b, 1});
    if (!real.count({b, a})) g.edges.push_back({b, a, -1});
  }
  std::sort(g.edges.begin(), g.edges.end(),
            [](const auto& x, const auto& y) { return std::tie(x.src, x.dst) < std::tie(y.src, y.dst); });
  return g;
}

EmbeddingTable train_sequence_embedding(const std::vector<std::vector<StmtId>>& paths, const SgnsConfig& cfg) {
  std::vector<std::vector<std::string>> sentences;
  for (const auto& p : paths) {
    if (p.empty()) continue;
    std::vector<std::string> s;
    s.reserve(p.size());
    for (StmtId id : p) s.push_back(std::to_string(id));
    sentences.push_back(std::move(s));
  }
  if (sentences.empty()) fail(ErrorKind::data, "sequence embedding: empty corpus");
  return train_token_embedding(sentences, cfg);
}

namespace {

struct Adjacency {
  std::vector<std::vector<std::pair<std::size_t, double>>> out;  // (dst, mass)
  std::vector<std::set<std::size_t>> succ;
};

Adjacency adjacency(const WeightedDfg& g, double artificial_mass) {
  Adjacency a;
  a.out.resize(g.nodes);
  a.succ.resize(g.nodes);
  for (const auto& e : g.edges) {
    const double mass = std::abs(static_cast<double>(e.weight)) * (e.weight < 0 ? artificial_mass : 1.0);
    if (mass <= 0.0) continue;
    a.out[e.src].emplace_back(e.dst, mass);
    a.succ[e.src].insert(e.dst);
  }
  return a;
}

std::vector<std::size_t> walk(const Adjacency& a, std::size_t start, std::size_t length, double p, double q, Rng& rng) {
  std::vector<std::size_t> w{start};
  std::vector<double> mass;
  while (w.size() < length) {
    const std::size_t cur = w.back();
    const auto& nbrs = a.out[cur];
    if (nbrs.empty()) break;
    mass.clear();
    double total = 0.0;
    for (const auto& [x, m] : nbrs) {
      double bias = 1.0;
      if (w.size() >= 2) {
        const std::size_t prev = w[w.size() - 2];
        if (x == prev) {
          bias = 1.0 / p;
        } else if (!a.succ[prev].count(x)) {
          bias = 1.0 / q;
        }
      }
      total += m * bias;
      mass.push_back(total);
    }
    const double u = rng.uniform() * total;
    std::size_t k = static_cast<std::size_t>(std::upper_bound(mass.begin(), mass.end(), u) - mass.begin());
    w.push_back(nbrs[std::min(k, nbrs.size() - 1)].first);
  }
  return w;
}

}  // namespace

std::vector<std::size_t> node2vec_walk(const WeightedDfg& g, std::size_t start, std::size_t length, double p, double q,
                                       double artificial_edge_mass, Rng& rng) {
  if (start >= g.nodes) fail(ErrorKind::data, "node2vec: start node out of range");
  return walk(adjacency(g, artificial_edge_mass), start, length, p, q, rng);
}

EmbeddingTable train_graph_embedding(const WeightedDfg& g, const Node2VecConfig& cfg) {
  if (g.nodes == 0) fail(ErrorKind::data, "graph embedding: no nodes");
  if (cfg.p <= 0 || cfg.q <= 0) fail(ErrorKind::config, "node2vec p and q must be positive");
  const Adjacency a = adjacency(g, cfg.artificial_edge_mass);
  Rng rng(derive_seed(cfg.sgns.seed, 0x2e2e));
  std::vector<std::vector<std::size_t>> corpus;
  for (std::size_t r = 0; r < cfg.walks_per_node; ++r) {
    for (std::size_t v = 0; v < g.nodes; ++v) corpus.push_back(walk(a, v, std::max<std::size_t>(cfg.walk_len, 1), cfg.p, cfg.q, rng));
  }
  if (corpus.empty()) {
    for (std::size_t v = 0; v < g.nodes; ++v) corpus.push_back({v});
  }
  const SgnsModel model = train_sgns(corpus, g.nodes, cfg.sgns);
  EmbeddingTable table;
  table.dim = cfg.sgns.dim;
  for (std::size_t v = 0; v < g.nodes; ++v) table.vectors.emplace(std::to_string(v), model.vector_of(v));
  return table;
}

std::vector<std::vector<double>> statement_dependency_vectors(const EmbeddingTable& seq, const EmbeddingTable& graph,
                                                              std::size_t m) {
  if (seq.dim != graph.dim) {
    fail(ErrorKind::data, "statement vectors: dim mismatch " + std::to_string(seq.dim) + " vs " +
                              std::to_string(graph.dim));
  }
  std::vector<std::vector<double>> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto key = std::to_string(i);
    const auto a = seq.lookup(key), b = graph.lookup(key);
    out[i].resize(seq.dim);
    for (std::size_t k = 0; k < seq.dim; ++k) out[i][k] = a[k] * b[k];
  }
  return out;
}

NdArray combine_with_matrix(const CoverageMatrix& ecc, const std::vector<std::vector<double>>& sd) {
  if (sd.size() != ecc.rows) {
    fail(ErrorKind::data, "combine_with_matrix: " + std::to_string(sd.size()) + " vectors for " +
                              std::to_string(ecc.rows) + " statements");
  }
  const std::size_t d = sd.empty() ? 0 : sd[0].size();
  NdArray out({ecc.rows, ecc.cols, d});
  for (std::size_t i = 0; i < ecc.rows; ++i) {
    if (sd[i].size() != d) fail(ErrorKind::data, "combine_with_matrix: ragged statement vectors");
    for (std::size_t p = 0; p < ecc.cols; ++p) {
      const double v = ecc.ordered(i, p);
      for (std::size_t k = 0; k < d; ++k) out.at(i, p, k) = v * sd[i][k];
    }
  }
  return out;
}

NdArray combine_mutation(const std::vector<MutationMatrix>& mbm, const CoverageMatrix& spectrum,
                         const std::vector<std::vector<double>>& sd, std::optional<std::size_t> k) {
  const std::size_t m = spectrum.rows, n = spectrum.cols;
  if (sd.size() != m) fail(ErrorKind::data, "combine_mutation: statement vector count mismatch");
  if (mbm.empty()) fail(ErrorKind::data, "combine_mutation: method has no mutants");
  std::vector<std::vector<const CoverageMatrix*>> per(m);
  for (const auto& mm : mbm) {
    if (mm.stmt_id >= m) fail(ErrorKind::data, "combine_mutation: mutant on unknown statement");
    if (mm.matrix.rows != m || mm.matrix.cols != n) fail(ErrorKind::data, "combine_mutation: mutant matrix shape");
    per[mm.stmt_id].push_back(&mm.matrix);
  }
  std::size_t kk = 0;
  for (const auto& v : per) kk = std::max(kk, v.size());
  if (k) kk = *k;
  if (kk == 0) fail(ErrorKind::data, "combine_mutation: k must be positive");
  const std::size_t d = sd.empty() ? 0 : sd[0].size();
  NdArray out({m, kk, n, d});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < kk; ++t) {
      const CoverageMatrix& src = t < per[i].size() ? *per[i][t] : spectrum;
      for (std::size_t p = 0; p < n; ++p) {
        const double v = src.ordered(i, p);
        for (std::size_t c = 0; c < d; ++c) out.at(i, t, p, c) = v * sd[i][c];
      }
    }
  }
  return out;
}

}  // namespace covrank
