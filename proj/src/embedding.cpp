#include "covrank/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "covrank/error.hpp"
#include "covrank/rng.hpp"
#include "covrank/simd.hpp"

namespace covrank {

std::vector<double> SgnsModel::vector_of(std::size_t token) const {
  std::vector<double> v = input.at(token);
  simd::axpy(1.0, output.at(token), v);
  return v;
}

namespace {

double sigmoid(double x) {
  if (x > 30) return 1.0;
  if (x < -30) return 0.0;
  return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

SgnsModel train_sgns(const std::vector<std::vector<std::size_t>>& corpus, std::size_t vocab, const SgnsConfig& cfg) {
  if (cfg.dim == 0) fail(ErrorKind::config, "embedding dim must be positive");
  SgnsModel model;
  model.dim = cfg.dim;
  model.frequency.assign(vocab, 0);
  std::size_t tokens = 0;
  for (const auto& s : corpus) {
    for (std::size_t t : s) {
      if (t >= vocab) fail(ErrorKind::data, "sgns: token " + std::to_string(t) + " outside vocabulary");
      ++model.frequency[t];
      ++tokens;
    }
  }
  if (tokens == 0) fail(ErrorKind::data, "sgns: empty corpus");

  Rng rng(derive_seed(cfg.seed, 0x5165));
  const double half = 0.5 / static_cast<double>(cfg.dim);
  model.input.assign(vocab, std::vector<double>(cfg.dim));
  model.output.assign(vocab, std::vector<double>(cfg.dim, 0.0));
  for (auto& v : model.input) {
    for (double& x : v) x = rng.uniform(-half, half);
  }

  // Cumulative unigram^0.75 mass for negative draws.
  std::vector<double> cdf(vocab);
  double acc = 0.0;
  for (std::size_t t = 0; t < vocab; ++t) {
    acc += std::pow(static_cast<double>(model.frequency[t]), 0.75);
    cdf[t] = acc;
  }
  auto draw = [&]() {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(vocab) - 1));
  };

  std::size_t pairs_per_epoch = 0;
  for (const auto& s : corpus) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::size_t lo = i >= cfg.window ? i - cfg.window : 0;
      const std::size_t hi = std::min(s.size() - 1, i + cfg.window);
      pairs_per_epoch += hi - lo;
    }
  }
  const double total = static_cast<double>(pairs_per_epoch * cfg.epochs);
  double done = 0.0;
  std::vector<double> grad(cfg.dim);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& s : corpus) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        const std::size_t lo = i >= cfg.window ? i - cfg.window : 0;
        const std::size_t hi = std::min(s.size() - 1, i + cfg.window);
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == i) continue;
          const double lr = std::max(cfg.lr * (1.0 - done / total), cfg.lr * 1e-4);
          done += 1.0;
          auto& in = model.input[s[i]];
          std::fill(grad.begin(), grad.end(), 0.0);
          for (std::size_t k = 0; k <= cfg.negatives; ++k) {
            std::size_t target;
            double label;
            if (k == 0) {
              target = s[c];
              label = 1.0;
            } else {
              target = draw();
              if (target == s[c]) continue;
              label = 0.0;
            }
            auto& out = model.output[target];
            const double g = lr * (label - sigmoid(simd::dot(in, out)));
            simd::axpy(g, out, grad);
            simd::axpy(g, in, out);
          }
          simd::axpy(1.0, grad, in);
        }
      }
    }
  }
  return model;
}

std::vector<double> EmbeddingTable::lookup(const std::string& token) const {
  const auto it = vectors.find(token);
  if (it == vectors.end()) return std::vector<double>(dim, 1.0);
  return it->second;
}

std::string EmbeddingTable::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "token";
  for (std::size_t k = 0; k < dim; ++k) out << ",v" << k;
  out << "\n";
  for (const auto& [tok, v] : vectors) {
    out << '"';
    for (char ch : tok) out << (ch == '"' ? std::string("\"\"") : std::string(1, ch));
    out << '"';
    for (double x : v) out << "," << x;
    out << "\n";
  }
  return out.str();
}

EmbeddingTable train_token_embedding(const std::vector<std::vector<std::string>>& sentences, const SgnsConfig& cfg) {
  std::map<std::string, std::size_t> ids;
  for (const auto& s : sentences) {
    for (const auto& t : s) ids.emplace(t, 0);
  }
  std::size_t next = 0;
  for (auto& [tok, id] : ids) id = next++;
  std::vector<std::vector<std::size_t>> corpus;
  corpus.reserve(sentences.size());
  for (const auto& s : sentences) {
    std::vector<std::size_t> c;
    c.reserve(s.size());
    for (const auto& t : s) c.push_back(ids.at(t));
    corpus.push_back(std::move(c));
  }
  EmbeddingTable table;
  table.dim = cfg.dim;
  if (ids.empty()) return table;
  const SgnsModel model = train_sgns(corpus, ids.size(), cfg);
  for (const auto& [tok, id] : ids) table.vectors.emplace(tok, model.vector_of(id));
  return table;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = std::sqrt(simd::dot(a, a)), nb = std::sqrt(simd::dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return simd::dot(a, b) / (na * nb);
}

}  // namespace covrank
