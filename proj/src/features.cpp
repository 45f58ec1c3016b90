#include "covrank/features.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "covrank/error.hpp"
#include "covrank/rng.hpp"
#include "covrank/sbfl.hpp"

namespace covrank {

NdArray broadcast_hadamard(const std::vector<std::vector<double>>& vs) {
  if (vs.size() < 2) fail(ErrorKind::data, "broadcast_hadamard: needs at least two vectors");
  Shape shape;
  for (const auto& v : vs) {
    if (v.empty()) fail(ErrorKind::data, "broadcast_hadamard: zero-length vector");
    shape.push_back(v.size());
  }
  // Grow the product one axis at a time: out[..., i] = prev[...] * v[i].
  std::vector<double> acc(vs[0]);
  std::vector<double> next;
  for (std::size_t t = 1; t < vs.size(); ++t) {
    const auto& v = vs[t];
    next.resize(acc.size() * v.size());
    for (std::size_t a = 0; a < acc.size(); ++a) {
      double* row = next.data() + a * v.size();
      for (std::size_t i = 0; i < v.size(); ++i) row[i] = acc[a] * v[i];
    }
    acc.swap(next);
  }
  return NdArray(shape, std::move(acc));
}

ProjectTables build_project_tables(const ProjectDataset& project, const FeatureConfig& cfg) {
  ProjectTables t;
  std::vector<std::vector<std::string>> statements, paths;
  for (const auto& b : project.bugs) {
    for (const auto& m : b.methods) {
      for (const auto& s : m.statements) {
        auto toks = tokenize_statement(s.text);
        if (!toks.empty()) statements.push_back(std::move(toks));
      }
      for (const auto& p : extract_long_paths(m.ast, cfg.max_paths, cfg.path_len)) paths.push_back(path_tokens(p));
    }
  }
  SgnsConfig sg = cfg.sgns;
  sg.dim = cfg.token_dim;
  sg.seed = derive_seed(cfg.seed, hash_string("tokens/" + project.project));
  t.tokens = train_token_embedding(statements, sg);
  sg.seed = derive_seed(cfg.seed, hash_string("nodes/" + project.project));
  t.nodes = train_token_embedding(paths, sg);
  t.tokens.dim = t.nodes.dim = cfg.token_dim;
  t.corpus = TfidfCorpus(project_documents(project));
  return t;
}

CoverageMatrix enhanced_matrix(const MethodRecord& method, const FeatureConfig& cfg) {
  CoverageMatrix cm;
  if (method.coverage) {
    // Externally supplied cells already carry their EE marks.
    const auto& rows = *method.coverage;
    cm = CoverageMatrix(rows.size(), method.tests.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < rows[i].size(); ++j) cm.at(i, j) = static_cast<std::int8_t>(rows[i][j]);
    }
    if (!cfg.toggles.ee_marks) {
      for (auto& c : cm.cells) c = c == -1 ? 1 : c;
    }
  } else {
    cm = build_spectrum_matrix(method);
    if (cfg.toggles.ee_marks) {
      const auto outcomes = outcomes_of(method.tests);
      cm = mark_ee(cm, resolve_all(method, method.tests), outcomes, cfg.ee_mode);
    }
  }
  if (cfg.toggles.ordering) cm = order_tests(cm);
  return cm;
}

std::vector<MutationMatrix> enhanced_mutation_matrices(const MethodRecord& method, const CoverageMatrix& ecc,
                                                       const FeatureConfig& cfg) {
  auto mbm = build_mutation_matrices(method);
  std::unordered_map<std::string, const MutantRecord*> by_id;
  for (const auto& mu : method.mutants) by_id.emplace(mu.mutant_id, &mu);
  for (auto& mm : mbm) {
    if (cfg.toggles.ee_marks) {
      const auto& tests = by_id.at(mm.mutant_id)->tests;
      mm.matrix = mark_ee(mm.matrix, resolve_all(method, tests), outcomes_of(tests), cfg.ee_mode);
    }
    mm.matrix.col_order = ecc.col_order;
  }
  return mbm;
}

std::vector<std::vector<double>> method_dependency_vectors(const MethodRecord& method, const std::string& bug_id,
                                                           const FeatureConfig& cfg) {
  const std::size_t m = method.statements.size();
  if (!cfg.toggles.stat_dep) return std::vector<std::vector<double>>(m, std::vector<double>(cfg.dim, 1.0));
  const std::uint64_t base = derive_seed(cfg.seed, hash_string(bug_id + "/" + method.method_id));
  EmbeddingTable seq;
  seq.dim = cfg.dim;
  std::vector<std::vector<StmtId>> paths;
  for (const auto& t : method.tests) {
    if (!t.exec_path.empty()) paths.push_back(t.exec_path);
  }
  SgnsConfig sg = cfg.sgns;
  sg.dim = cfg.dim;
  if (!paths.empty()) {
    sg.seed = derive_seed(base, 1);
    seq = train_sequence_embedding(paths, sg);
  }
  Node2VecConfig nv = cfg.node2vec;
  nv.sgns = sg;
  nv.sgns.seed = derive_seed(base, 2);
  const EmbeddingTable graph = train_graph_embedding(build_weighted_dfg(method.dfg_edges, m), nv);
  return statement_dependency_vectors(seq, graph, m);
}

namespace {

void maybe_standardize(NdArray& x, const FeatureConfig& cfg) {
  if (cfg.standardize) standardize(x);
}

}  // namespace

MethodFeatures build_method_features(const BugRecord& bug, const MethodRecord& method, const ProjectTables& tables,
                                     const FeatureConfig& cfg) {
  MethodFeatures f;
  f.method_id = method.method_id;
  f.faulty = method.is_faulty;
  const std::size_t m = method.statements.size();
  f.statements = m;
  for (const auto& s : method.statements) f.faulty_stmt.push_back(s.is_faulty);

  const auto outcomes = outcomes_of(method.tests);
  const auto raw = build_spectrum_matrix(method);
  f.ochiai = sbfl_scores(raw, outcomes, Formula::ochiai);
  f.dstar = sbfl_scores(raw, outcomes, Formula::dstar);

  f.ecc = enhanced_matrix(method, cfg);
  const auto sd = method_dependency_vectors(method, bug.bug_id, cfg);
  const NdArray spec = combine_with_matrix(f.ecc, sd);  // (m, n, d)
  const std::size_t n = f.ecc.cols, d = cfg.dim, N = cfg.tests, M = cfg.stmts, K = cfg.mutants;
  const std::size_t nn = std::min(n, N);

  f.x_sm = NdArray({d, M, N});
  for (std::size_t i = 0; i < m; ++i) {
    NdArray x({1, N, d});
    for (std::size_t p = 0; p < nn; ++p) {
      for (std::size_t c = 0; c < d; ++c) {
        x.at(0, p, c) = spec.at(i, p, c);
        if (i < M) f.x_sm.at(c, i, p) = spec.at(i, p, c);
      }
    }
    maybe_standardize(x, cfg);
    f.x_ss.push_back(std::move(x));
  }
  maybe_standardize(f.x_sm, cfg);

  if (cfg.toggles.mutation && !method.mutants.empty()) {
    const auto mbm = enhanced_mutation_matrices(method, f.ecc, cfg);
    const NdArray mut = combine_mutation(mbm, f.ecc, sd, K);  // (m, K, n, d)
    f.x_mm = NdArray({d, K, M, N});
    for (std::size_t i = 0; i < m; ++i) {
      NdArray x({K, N, d});
      for (std::size_t t = 0; t < K; ++t) {
        for (std::size_t p = 0; p < nn; ++p) {
          for (std::size_t c = 0; c < d; ++c) {
            const double v = mut.at(i, t, p, c);
            x.at(t, p, c) = v;
            if (i < M) f.x_mm.at(c, t, i, p) = v;
          }
        }
      }
      maybe_standardize(x, cfg);
      f.x_ms.push_back(std::move(x));
    }
    maybe_standardize(f.x_mm, cfg);
  }

  if (cfg.toggles.code_rep) {
    for (const auto& s : method.statements) {
      NdArray x = token_matrix(tokenize_statement(s.text), tables.tokens, cfg.token_window);
      maybe_standardize(x, cfg);
      f.x_cs.push_back(std::move(x));
    }
    f.x_cm = path_bag_matrix(extract_long_paths(method.ast, cfg.max_paths, cfg.path_len), tables.nodes, cfg.path_len);
    maybe_standardize(f.x_cm, cfg);
  }
  if (cfg.toggles.text_sim) {
    f.sim = tfidf_similarity(bug.failing_test_facets, method.facets, tables.corpus);
  } else {
    f.sim.fill(1.0);
  }
  return f;
}

std::vector<ProjectFeatures> build_features(const std::vector<ProjectDataset>& projects, const FeatureConfig& cfg,
                                            std::size_t threads) {
  std::vector<ProjectFeatures> out(projects.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(projects.size());
  auto work = [&]() {
    for (std::size_t p = next++; p < projects.size(); p = next++) {
      try {
        const auto& proj = projects[p];
        const ProjectTables tables = build_project_tables(proj, cfg);
        ProjectFeatures pf;
        pf.project = proj.project;
        for (const auto& b : proj.bugs) {
          BugFeatures bf;
          bf.bug_id = b.bug_id;
          bf.tie_heavy = b.tie_heavy.value_or(false);
          for (const auto& m : b.methods) bf.methods.push_back(build_method_features(b, m, tables, cfg));
          pf.bugs.push_back(std::move(bf));
        }
        out[p] = std::move(pf);
      } catch (const Error& e) {
        errors[p] = e.what();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, projects.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (!e.empty()) fail(ErrorKind::data, e);
  }
  return out;
}

}  // namespace covrank
