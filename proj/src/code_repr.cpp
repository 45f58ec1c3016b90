#include "covrank/code_repr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "covrank/error.hpp"

namespace covrank {

namespace {

constexpr std::array kMultiOps = {"<<=", ">>=", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=",
                                  "/=",  "->",  "::", "<<", ">>"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

}  // namespace

std::vector<std::string> tokenize_statement(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (ident_start(c)) {
      while (j < text.size() && ident_char(text[j])) ++j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '.')) ++j;
    } else {
      for (const char* op : kMultiOps) {
        const std::string_view v(op);
        if (text.compare(i, v.size(), v) == 0) {
          j = i + v.size();
          break;
        }
      }
    }
    out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

NdArray token_matrix(const std::vector<std::string>& tokens, const EmbeddingTable& table, std::size_t window) {
  NdArray m({window, table.dim});
  for (std::size_t t = 0; t < std::min(window, tokens.size()); ++t) {
    const auto v = table.lookup(tokens[t]);
    std::copy(v.begin(), v.end(), m.values().begin() + static_cast<std::ptrdiff_t>(t * table.dim));
  }
  return m;
}

std::vector<double> statement_vector(const std::vector<std::string>& tokens, const EmbeddingTable& table,
                                     const FcLayer& reducer, std::size_t window) {
  if (reducer.in != window * table.dim) {
    fail(ErrorKind::config, "statement_vector: reducer width " + std::to_string(reducer.in) + " != " +
                                std::to_string(window * table.dim));
  }
  return fc_forward(reducer, token_matrix(tokens, table, window).values());
}

const AstNode& path_apex(const AstNode& root) {
  const AstNode* n = &root;
  while (n->children.size() == 1) n = &n->children[0];
  return *n;
}

namespace {

struct LeafTrail {
  std::size_t index;
  std::size_t branch;                  // apex child holding the leaf
  std::vector<const AstNode*> upward;  // leaf first, apex child last
};

void collect(const AstNode& n, std::size_t branch, std::vector<const AstNode*>& stack, std::vector<LeafTrail>& out) {
  stack.push_back(&n);
  if (n.is_leaf()) {
    out.push_back({out.size(), branch, std::vector<const AstNode*>(stack.rbegin(), stack.rend())});
  } else {
    for (const auto& c : n.children) collect(c, branch, stack, out);
  }
  stack.pop_back();
}

}  // namespace

std::vector<LongPath> extract_long_paths(const AstNode& ast, std::size_t max_paths, std::size_t max_len) {
  const AstNode& apex = path_apex(ast);
  std::vector<LeafTrail> leaves;
  std::vector<const AstNode*> stack;
  for (std::size_t b = 0; b < apex.children.size(); ++b) collect(apex.children[b], b, stack, leaves);
  std::vector<LongPath> out;
  for (std::size_t a = 0; a < leaves.size() && out.size() < max_paths; ++a) {
    for (std::size_t b = a + 1; b < leaves.size() && out.size() < max_paths; ++b) {
      if (leaves[a].branch == leaves[b].branch) continue;
      const std::size_t len = leaves[a].upward.size() + 1 + leaves[b].upward.size();
      if (len > max_len) continue;
      LongPath p;
      p.first_leaf = leaves[a].index;
      p.last_leaf = leaves[b].index;
      p.nodes = leaves[a].upward;
      p.nodes.push_back(&apex);
      p.nodes.insert(p.nodes.end(), leaves[b].upward.rbegin(), leaves[b].upward.rend());
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::string node_token(const AstNode& n) {
  if (n.is_leaf() && n.token) return *n.token;
  return n.kind;
}

std::vector<std::string> path_tokens(const LongPath& p) {
  std::vector<std::string> out;
  out.reserve(p.nodes.size());
  for (const AstNode* n : p.nodes) out.push_back(node_token(*n));
  return out;
}

NdArray path_bag_matrix(const std::vector<LongPath>& paths, const EmbeddingTable& table, std::size_t max_len) {
  NdArray m({max_len, table.dim});
  if (paths.empty()) return m;
  for (const auto& p : paths) {
    for (std::size_t t = 0; t < std::min(max_len, p.nodes.size()); ++t) {
      const auto v = table.lookup(node_token(*p.nodes[t]));
      for (std::size_t k = 0; k < table.dim; ++k) m.at(t, k) += v[k];
    }
  }
  const double inv = 1.0 / static_cast<double>(paths.size());
  for (double& x : m.values()) x *= inv;
  return m;
}

std::vector<double> method_code_vector(const std::vector<LongPath>& paths, const EmbeddingTable& table,
                                       const FcLayer& reducer, std::size_t max_len) {
  if (reducer.in != max_len * table.dim) {
    fail(ErrorKind::config, "method_code_vector: reducer width " + std::to_string(reducer.in) + " != " +
                                std::to_string(max_len * table.dim));
  }
  return fc_forward(reducer, path_bag_matrix(paths, table, max_len).values());
}

std::vector<std::string> text_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

TfidfCorpus::TfidfCorpus(const std::vector<std::string>& documents) : n_(documents.size()) {
  for (const auto& d : documents) {
    const auto toks = text_tokens(d);
    for (const auto& t : std::set<std::string>(toks.begin(), toks.end())) ++df_[t];
  }
}

std::map<std::string, double> TfidfCorpus::vectorize(const std::string& document) const {
  std::map<std::string, double> tf;
  for (const auto& t : text_tokens(document)) tf[t] += 1.0;
  for (auto& [t, w] : tf) {
    const auto it = df_.find(t);
    const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
    const double idf = std::log((1.0 + static_cast<double>(n_)) / (1.0 + df)) + 1.0;
    w = (1.0 + std::log(w)) * idf;
  }
  return tf;
}

double TfidfCorpus::similarity(const std::string& a, const std::string& b) const {
  const auto va = vectorize(a), vb = vectorize(b);
  if (va.empty() || vb.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, w] : va) {
    na += w * w;
    const auto it = vb.find(t);
    if (it != vb.end()) dot += w * it->second;
  }
  for (const auto& [t, w] : vb) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

std::vector<std::string> project_documents(const ProjectDataset& project) {
  std::vector<std::string> docs;
  for (const auto& b : project.bugs) {
    docs.push_back(b.failing_test_facets.names);
    docs.push_back(b.failing_test_facets.source);
    docs.push_back(b.failing_test_facets.messages);
    for (const auto& m : b.methods) {
      docs.push_back(m.facets.qualified_name);
      docs.push_back(m.facets.accessed_classes);
      docs.push_back(m.facets.invocations);
      docs.push_back(m.facets.variables);
      docs.push_back(m.facets.comments);
    }
  }
  return docs;
}

SimilarityVector tfidf_similarity(const FailingTestFacets& tests, const MethodFacets& method,
                                  const TfidfCorpus& corpus) {
  const std::array<const std::string*, 3> tf = {&tests.names, &tests.source, &tests.messages};
  const std::array<const std::string*, 5> cf = {&method.qualified_name, &method.accessed_classes, &method.invocations,
                                                &method.variables, &method.comments};
  SimilarityVector v{};
  for (std::size_t i = 0; i < tf.size(); ++i) {
    for (std::size_t j = 0; j < cf.size(); ++j) v[i * cf.size() + j] = corpus.similarity(*tf[i], *cf[j]);
  }
  return v;
}

}  // namespace covrank
