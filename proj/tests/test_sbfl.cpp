#include <gtest/gtest.h>

#include <cmath>

#include "covrank/error.hpp"
#include "covrank/ranking.hpp"
#include "covrank/sbfl.hpp"
#include "support/oracles.hpp"

namespace {

using namespace covrank;

std::vector<Outcome> random_outcomes(Rng& rng, std::size_t n) {
  std::vector<Outcome> o(n);
  for (auto& x : o) x = rng.chance(0.4) ? Outcome::fail : Outcome::pass;
  return o;
}

TEST(Counts, MatchLoopOracle) {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const auto m = 1 + rng.below(12), n = 1 + rng.below(12);
    const auto mx = oracle::random_ee_matrix(rng, m, n);
    const auto out = random_outcomes(rng, n);
    const auto c = counts(mx, out);
    ASSERT_EQ(c.size(), m);
    for (std::size_t i = 0; i < m; ++i) {
      SpectrumCounts want;
      for (std::size_t j = 0; j < n; ++j) {
        const bool cov = mx.at(i, j) != 0, f = out[j] == Outcome::fail;
        (cov ? (f ? want.ef : want.ep) : (f ? want.nf : want.np))++;
      }
      EXPECT_EQ(c[i], want);
    }
  }
}

TEST(Ochiai, ClosedForm) {
  Rng rng(5);
  for (int rep = 0; rep < 1000; ++rep) {
    SpectrumCounts c{rng.below(20), rng.below(20), rng.below(20), rng.below(20)};
    EXPECT_NEAR(ochiai(c), oracle::closed_form_ochiai(c.ef, c.ep, c.nf), 1e-12);
  }
  EXPECT_DOUBLE_EQ(ochiai({2, 0, 0, 5}), 1.0);
  EXPECT_EQ(ochiai({0, 0, 0, 5}), 0.0);
  EXPECT_NEAR(ochiai({1, 1, 1, 0}), 0.5, 1e-15);
}

TEST(Dstar, ValuesAndInfinity) {
  EXPECT_DOUBLE_EQ(dstar({3, 1, 2, 0}), 9.0 / 3.0);
  EXPECT_DOUBLE_EQ(dstar({3, 1, 2, 0}, 3), 27.0 / 3.0);
  EXPECT_EQ(dstar({2, 0, 0, 4}), kInfiniteScore);
  EXPECT_EQ(dstar({0, 0, 0, 4}), 0.0);
}

TEST(Sbfl, IdenticalRowsScoreEqually) {
  Rng rng(11);
  for (int rep = 0; rep < 300; ++rep) {
    const auto m = 2 + rng.below(10), n = 1 + rng.below(12);
    auto mx = oracle::random_ee_matrix(rng, m, n);
    const auto src = rng.below(m), dst = (src + 1 + rng.below(m - 1)) % m;
    for (std::size_t j = 0; j < n; ++j) mx.at(dst, j) = mx.at(src, j) == -1 ? 1 : mx.at(src, j);
    const auto out = random_outcomes(rng, n);
    for (auto f : {Formula::ochiai, Formula::dstar}) {
      const auto s = sbfl_scores(mx, out, f);
      EXPECT_EQ(s[src], s[dst]);
    }
  }
}

TEST(Sbfl, EeMarksDoNotChangeSpectrumScores) {
  Rng rng(19);
  for (int rep = 0; rep < 100; ++rep) {
    const auto mx = oracle::random_ee_matrix(rng, 6, 8);
    auto plain = mx;
    for (auto& v : plain.cells) v = v ? 1 : 0;
    const auto out = random_outcomes(rng, 8);
    EXPECT_EQ(sbfl_scores(mx, out, Formula::ochiai), sbfl_scores(plain, out, Formula::ochiai));
  }
}

TEST(Ranking, AverageTieRanks) {
  const std::vector<double> s = {0.5, 0.9, 0.5, 0.1, 0.5};
  const auto r = rank_by_score(s);
  ASSERT_EQ(r.entries.size(), 5u);
  EXPECT_EQ(r.entries[0].id, 1u);
  EXPECT_EQ(r.of(1).rank, 1.0);
  for (std::size_t id : {0u, 2u, 4u}) {
    EXPECT_EQ(r.of(id).rank, 3.0);
    EXPECT_EQ(r.of(id).best_position, 2u);
  }
  EXPECT_EQ(r.of(3).rank, 5.0);
  EXPECT_EQ(r.entries[1].id, 0u);
  EXPECT_EQ(r.entries[2].id, 2u);
}

TEST(Ranking, InfinityFirstNanRejected) {
  const std::vector<double> s = {1.0, kInfiniteScore, 2.0};
  EXPECT_EQ(rank_by_score(s).entries[0].id, 1u);
  const std::vector<double> bad = {1.0, std::nan("")};
  EXPECT_THROW(rank_by_score(bad), Error);
}

TEST(Ranking, RankSumIsInvariant) {
  Rng rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const auto n = 1 + rng.below(30);
    std::vector<double> s(n);
    for (auto& x : s) x = static_cast<double>(rng.below(4));
    double sum = 0.0;
    for (const auto& e : rank_by_score(s).entries) sum += e.rank;
    EXPECT_DOUBLE_EQ(sum, n * (n + 1) / 2.0);
  }
}

}  // namespace
