#include "covrank/metrics.hpp"

#include <algorithm>

#include "covrank/error.hpp"

namespace covrank {

RankedBug make_ranked_bug(std::string bug_id, std::string project, std::span<const double> scores,
                          const std::vector<bool>& faulty, bool tie_heavy) {
  if (faulty.size() != scores.size()) fail(ErrorKind::evaluation, "ranked bug: label count mismatch");
  RankedBug b;
  b.bug_id = std::move(bug_id);
  b.project = std::move(project);
  b.tie_heavy = tie_heavy;
  b.list = rank_by_score(scores);
  for (std::size_t i = 0; i < faulty.size(); ++i) {
    if (faulty[i]) b.faulty.push_back(i);
  }
  return b;
}

bool hit_at(const RankedBug& bug, std::size_t k) {
  return std::any_of(bug.faulty.begin(), bug.faulty.end(),
                     [&](std::size_t id) { return bug.list.of(id).best_position <= k; });
}

std::size_t topk_recall(std::span<const RankedBug> bugs, std::size_t k) {
  return static_cast<std::size_t>(std::count_if(bugs.begin(), bugs.end(), [&](const auto& b) { return hit_at(b, k); }));
}

double first_rank(const RankedBug& bug) {
  if (bug.faulty.empty()) fail(ErrorKind::evaluation, "bug " + bug.bug_id + " has no faulty element");
  double best = bug.list.of(bug.faulty[0]).rank;
  for (std::size_t id : bug.faulty) best = std::min(best, bug.list.of(id).rank);
  return best;
}

double average_rank(const RankedBug& bug) {
  if (bug.faulty.empty()) fail(ErrorKind::evaluation, "bug " + bug.bug_id + " has no faulty element");
  double sum = 0.0;
  for (std::size_t id : bug.faulty) sum += bug.list.of(id).rank;
  return sum / static_cast<double>(bug.faulty.size());
}

double mfr(std::span<const RankedBug> bugs) {
  if (bugs.empty()) fail(ErrorKind::evaluation, "mfr: no bugs");
  double s = 0.0;
  for (const auto& b : bugs) s += first_rank(b);
  return s / static_cast<double>(bugs.size());
}

double mar(std::span<const RankedBug> bugs) {
  if (bugs.empty()) fail(ErrorKind::evaluation, "mar: no bugs");
  double s = 0.0;
  for (const auto& b : bugs) s += average_rank(b);
  return s / static_cast<double>(bugs.size());
}

double random_topk_expectation(std::span<const RankedBug> bugs, std::size_t k) {
  double total = 0.0;
  for (const auto& b : bugs) {
    const std::size_t n = b.list.entries.size(), f = b.faulty.size();
    // P(no faulty in the first k) = prod_{i<k} (n-f-i)/(n-i)
    double miss = 1.0;
    for (std::size_t i = 0; i < std::min(k, n); ++i) {
      if (n - f <= i) {
        miss = 0.0;
        break;
      }
      miss *= static_cast<double>(n - f - i) / static_cast<double>(n - i);
    }
    total += 1.0 - miss;
  }
  return total;
}

Metrics summarize(std::span<const RankedBug> bugs) {
  Metrics m;
  m.bugs = bugs.size();
  if (bugs.empty()) return m;
  m.top1 = topk_recall(bugs, 1);
  m.top3 = topk_recall(bugs, 3);
  m.top5 = topk_recall(bugs, 5);
  m.percent = 100.0 * static_cast<double>(m.top1) / static_cast<double>(m.bugs);
  m.mfr = mfr(bugs);
  m.mar = mar(bugs);
  return m;
}

}  // namespace covrank
