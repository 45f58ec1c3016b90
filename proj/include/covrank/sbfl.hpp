#pragma once

// Spectrum-based suspiciousness baselines.

#include <limits>
#include <span>
#include <vector>

#include "covrank/dataset.hpp"
#include "covrank/ranking.hpp"

namespace covrank {

struct SpectrumCounts {
  std::size_t ef = 0;  // failing, covering
  std::size_t ep = 0;  // passing, covering
  std::size_t nf = 0;  // failing, not covering
  std::size_t np = 0;  // passing, not covering

  bool operator==(const SpectrumCounts&) const = default;
};

/// Per-row counts. Any nonzero cell counts as covered.
std::vector<SpectrumCounts> counts(const CoverageMatrix& matrix, std::span<const Outcome> outcomes);

inline constexpr double kInfiniteScore = std::numeric_limits<double>::infinity();

double ochiai(const SpectrumCounts& c);
/// ef^star / (ep + nf); kInfiniteScore when ep + nf = 0 and ef > 0.
double dstar(const SpectrumCounts& c, int star = 2);

enum class Formula { ochiai, dstar };

std::vector<double> sbfl_scores(const CoverageMatrix& matrix, std::span<const Outcome> outcomes, Formula f,
                                int star = 2);

}  // namespace covrank
