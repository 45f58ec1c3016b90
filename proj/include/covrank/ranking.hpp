#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace covrank {

struct RankedEntry {
  std::size_t id = 0;
  double score = 0.0;
  double rank = 0.0;          // average of the positions its tie group occupies
  std::size_t best_position = 0;  // first displayed position of its tie group

  bool operator==(const RankedEntry&) const = default;
};

/// Entries in display order: descending score, ties by ascending id.
struct RankedList {
  std::vector<RankedEntry> entries;

  const RankedEntry& of(std::size_t id) const;
  bool operator==(const RankedList&) const = default;
};

/// Ranks scores (+inf allowed, NaN rejected). Equal scores share the average
/// of their 1-based positions.
RankedList rank_by_score(std::span<const double> scores);

}  // namespace covrank
