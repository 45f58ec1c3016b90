#pragma once

// Error-exhibiting (EE) statements, -1 marking, and test-case ordering of
// coverage matrices.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covrank/dataset.hpp"

namespace covrank {

enum class EeSource { frame_match, exec_path_fallback };

struct EeResolution {
  std::string test_id;
  std::size_t test_index = 0;       // column in the method's matrix
  std::optional<StmtId> stmt_id;    // absent when the test never entered the method
  EeSource source = EeSource::frame_match;

  bool operator==(const EeResolution&) const = default;
};

/// EE statement of one failing test of a method. Frames are scanned in order;
/// the first whose method (and class, when the method id is qualified) names
/// this method and whose line falls inside a statement wins. Otherwise the
/// last statement of exec_path is used. Throws Error(data) for passing tests
/// and for an empty exec_path without a frame match.
EeResolution resolve_ee(const MethodRecord& method, const TestRecord& test, std::size_t test_index = 0);

/// Resolutions for every failing test. Failing tests that never executed the
/// method and match no frame get an empty stmt_id.
std::vector<EeResolution> resolve_all(const MethodRecord& method, const std::vector<TestRecord>& tests);

enum class EeMode { cell, row };

/// Sets cell[stmt][test] = -1 for every resolution with a statement. Row mode
/// marks the entire EE row instead (experimental). Throws Error(data) when a
/// resolution names a passing column.
CoverageMatrix mark_ee(const CoverageMatrix& matrix, const std::vector<EeResolution>& resolutions,
                       std::span<const Outcome> outcomes, EeMode mode = EeMode::cell);

/// Column ordering that clusters 1 and -1 cells to the left. Only col_order
/// changes.
CoverageMatrix order_tests(const CoverageMatrix& matrix);

std::vector<Outcome> outcomes_of(const std::vector<TestRecord>& tests);

/// Rows of '.', '#', '*' for 0, 1, -1 in display order.
std::string render_matrix(const CoverageMatrix& matrix);

}  // namespace covrank
