#pragma once

// Top-K recall, mean first rank and mean average rank over ranked bugs.

#include <span>
#include <string>
#include <vector>

#include "covrank/ranking.hpp"

namespace covrank {

/// One bug's ranked elements with the ids of its faulty elements.
struct RankedBug {
  std::string bug_id;
  std::string project;
  bool tie_heavy = false;
  RankedList list;
  std::vector<std::size_t> faulty;
};

/// Ranks scores and collects the faulty ids.
RankedBug make_ranked_bug(std::string bug_id, std::string project, std::span<const double> scores,
                          const std::vector<bool>& faulty, bool tie_heavy = false);

/// True when a faulty element's tie group starts at a displayed position <= k.
bool hit_at(const RankedBug& bug, std::size_t k);

std::size_t topk_recall(std::span<const RankedBug> bugs, std::size_t k);

/// Smallest average-tie rank of a faulty element. Throws Error(evaluation)
/// when the bug has none.
double first_rank(const RankedBug& bug);
/// Mean average-tie rank of the faulty elements.
double average_rank(const RankedBug& bug);

/// Throws Error(evaluation) for an empty set.
double mfr(std::span<const RankedBug> bugs);
double mar(std::span<const RankedBug> bugs);

/// Expected Top-K count of a ranker that orders elements uniformly at random:
/// sum over bugs of 1 - C(n - f, k) / C(n, k).
double random_topk_expectation(std::span<const RankedBug> bugs, std::size_t k);

struct Metrics {
  std::size_t bugs = 0;
  std::size_t top1 = 0;
  std::size_t top3 = 0;
  std::size_t top5 = 0;
  double percent = 0.0;  // 100 * top1 / bugs
  double mfr = 0.0;
  double mar = 0.0;

  bool operator==(const Metrics&) const = default;
};

/// All-zero metrics for an empty set.
Metrics summarize(std::span<const RankedBug> bugs);

}  // namespace covrank
