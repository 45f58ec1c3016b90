#include "covrank/sbfl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "covrank/error.hpp"

namespace covrank {

const RankedEntry& RankedList::of(std::size_t id) const {
  for (const auto& e : entries) {
    if (e.id == id) return e;
  }
  fail(ErrorKind::evaluation, "ranked list has no element " + std::to_string(id));
}

RankedList rank_by_score(std::span<const double> scores) {
  for (double s : scores) {
    if (std::isnan(s)) fail(ErrorKind::evaluation, "rank_by_score: NaN score");
  }
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  RankedList out;
  out.entries.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) out.entries.push_back({idx[t], scores[idx[t]], avg, i + 1});
    i = j;
  }
  return out;
}

std::vector<SpectrumCounts> counts(const CoverageMatrix& matrix, std::span<const Outcome> outcomes) {
  if (outcomes.size() != matrix.cols) fail(ErrorKind::data, "counts: outcome count differs from column count");
  std::vector<SpectrumCounts> out(matrix.rows);
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    auto& c = out[i];
    for (std::size_t j = 0; j < matrix.cols; ++j) {
      const bool cov = matrix.at(i, j) != 0;
      const bool failed = outcomes[j] == Outcome::fail;
      if (cov) {
        (failed ? c.ef : c.ep)++;
      } else {
        (failed ? c.nf : c.np)++;
      }
    }
  }
  return out;
}

double ochiai(const SpectrumCounts& c) {
  if (c.ef == 0) return 0.0;
  return static_cast<double>(c.ef) / std::sqrt(static_cast<double>(c.ef + c.nf) * static_cast<double>(c.ef + c.ep));
}

double dstar(const SpectrumCounts& c, int star) {
  if (star < 1) fail(ErrorKind::config, "dstar: star must be at least 1");
  if (c.ef == 0) return 0.0;
  const std::size_t denom = c.ep + c.nf;
  if (denom == 0) return kInfiniteScore;
  return std::pow(static_cast<double>(c.ef), star) / static_cast<double>(denom);
}

std::vector<double> sbfl_scores(const CoverageMatrix& matrix, std::span<const Outcome> outcomes, Formula f, int star) {
  std::vector<double> out;
  for (const auto& c : counts(matrix, outcomes)) out.push_back(f == Formula::ochiai ? ochiai(c) : dstar(c, star));
  return out;
}

}  // namespace covrank
