#include "covrank/dataset.hpp"

#include <algorithm>
#include <set>

#include "covrank/error.hpp"

namespace covrank {

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
  fail(ErrorKind::data, "invariant violation at " + where + ": " + what);
}

void validate_test(const TestRecord& t, std::size_t m, const std::string& where) {
  const std::string at = where + " test '" + t.test_id + "'";
  for (StmtId s : t.exec_path) {
    if (s >= m) invalid(at, "exec_path references stmt_id " + std::to_string(s));
  }
  for (std::size_t i = 0; i < t.covered.size(); ++i) {
    if (t.covered[i] >= m) invalid(at, "covered references stmt_id " + std::to_string(t.covered[i]));
    if (i && t.covered[i] <= t.covered[i - 1]) invalid(at, "covered must be sorted and unique");
  }
  std::set<StmtId> path_set(t.exec_path.begin(), t.exec_path.end());
  if (!std::equal(path_set.begin(), path_set.end(), t.covered.begin(), t.covered.end())) {
    invalid(at, "covered differs from the set of exec_path statements");
  }
  if (t.error) {
    if (t.outcome != Outcome::fail) invalid(at, "error message on a passing test");
    if (t.error->frames.empty()) invalid(at, "error message without frames");
    for (const auto& f : t.error->frames) {
      if (f.line < 1) invalid(at, "frame line " + std::to_string(f.line) + " < 1");
    }
  }
}

}  // namespace

CoverageMatrix::CoverageMatrix(std::size_t rows_, std::size_t cols_, MatrixKind kind_)
    : rows(rows_), cols(cols_), cells(rows_ * cols_, 0), col_order(cols_), kind(kind_) {
  for (std::size_t j = 0; j < cols; ++j) col_order[j] = j;
}

void CoverageMatrix::validate(bool allow_multi_ee) const {
  if (cells.size() != rows * cols) fail(ErrorKind::data, "coverage matrix: cell count does not match shape");
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const int v = at(i, j);
      if (v != 1 && v != 0 && v != -1) {
        fail(ErrorKind::data, "coverage matrix: cell [" + std::to_string(i) + "][" + std::to_string(j) +
                                  "] = " + std::to_string(v) + " not in {1,0,-1}");
      }
    }
  }
  if (col_order.size() != cols) fail(ErrorKind::data, "coverage matrix: col_order length mismatch");
  std::vector<bool> seen(cols, false);
  for (std::size_t p : col_order) {
    if (p >= cols || seen[p]) fail(ErrorKind::data, "coverage matrix: col_order is not a permutation");
    seen[p] = true;
  }
  if (!allow_multi_ee) {
    for (std::size_t j = 0; j < cols; ++j) {
      int minus = 0;
      for (std::size_t i = 0; i < rows; ++i) minus += at(i, j) == -1;
      if (minus > 1) fail(ErrorKind::data, "coverage matrix: column " + std::to_string(j) + " has several -1 cells");
    }
  }
}

void validate_method(const MethodRecord& m, const std::string& bug_id) {
  const std::string where = "bug '" + bug_id + "' method '" + m.method_id + "'";
  const std::size_t n_stmt = m.statements.size();
  if (n_stmt == 0) invalid(where, "no statements");
  for (std::size_t i = 0; i < n_stmt; ++i) {
    const auto& s = m.statements[i];
    if (s.stmt_id != i) invalid(where, "stmt_id " + std::to_string(s.stmt_id) + " at position " + std::to_string(i));
    if (s.line < 1) invalid(where, "statement " + std::to_string(i) + " has line < 1");
    if (s.end_line < s.line) invalid(where, "statement " + std::to_string(i) + " ends before it starts");
    if (i && s.line <= m.statements[i - 1].end_line) {
      invalid(where, "statement lines must strictly increase (stmt " + std::to_string(i) + ")");
    }
  }
  if (m.tests.empty()) invalid(where, "method has no tests");
  for (const auto& t : m.tests) validate_test(t, n_stmt, where);
  for (const auto& [src, dst] : m.dfg_edges) {
    if (src >= n_stmt || dst >= n_stmt) invalid(where, "dfg edge endpoint out of range");
    if (src == dst) invalid(where, "dfg self edge on stmt " + std::to_string(src));
  }
  for (const auto& mu : m.mutants) {
    const std::string at = where + " mutant '" + mu.mutant_id + "'";
    if (mu.stmt_id >= n_stmt) invalid(at, "unknown stmt_id " + std::to_string(mu.stmt_id));
    if (mu.tests.size() != m.tests.size()) invalid(at, "test list differs from the method's tests");
    for (std::size_t j = 0; j < mu.tests.size(); ++j) {
      if (mu.tests[j].test_id != m.tests[j].test_id) invalid(at, "test_id mismatch at " + std::to_string(j));
      validate_test(mu.tests[j], n_stmt, at);
    }
  }
  if (m.coverage) {
    const auto& rows = *m.coverage;
    if (rows.size() != n_stmt) invalid(where, "coverage has " + std::to_string(rows.size()) + " rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.tests.size()) invalid(where, "coverage row " + std::to_string(i) + " has wrong width");
      for (std::size_t j = 0; j < rows[i].size(); ++j) {
        const int v = rows[i][j];
        if (v != 1 && v != 0 && v != -1) {
          invalid(where, "coverage[" + std::to_string(i) + "][" + std::to_string(j) + "] = " + std::to_string(v) +
                             " not in {1,0,-1}");
        }
      }
    }
  }
}

void validate_bug(const BugRecord& b) {
  if (b.methods.empty()) invalid("bug '" + b.bug_id + "'", "no methods");
  bool any_faulty = false, any_fail = false;
  for (const auto& m : b.methods) {
    validate_method(m, b.bug_id);
    any_faulty |= m.is_faulty;
    for (const auto& t : m.tests) any_fail |= t.failed();
  }
  if (!any_faulty) invalid("bug '" + b.bug_id + "'", "no method flagged is_faulty");
  if (!any_fail) invalid("bug '" + b.bug_id + "'", "no failing test");
}

void validate_dataset(const ProjectDataset& d) {
  std::set<std::string> ids;
  for (const auto& b : d.bugs) {
    if (!ids.insert(b.bug_id).second) invalid("project '" + d.project + "'", "duplicate bug_id " + b.bug_id);
    validate_bug(b);
  }
}

CoverageMatrix build_spectrum_matrix(std::size_t statements, const std::vector<TestRecord>& tests, MatrixKind kind) {
  CoverageMatrix cm(statements, tests.size(), kind);
  for (std::size_t j = 0; j < tests.size(); ++j) {
    for (StmtId s : tests[j].covered) cm.at(s, j) = 1;
  }
  return cm;
}

CoverageMatrix build_spectrum_matrix(const MethodRecord& method) {
  return build_spectrum_matrix(method.statements.size(), method.tests, MatrixKind::spectrum);
}

std::vector<MutationMatrix> build_mutation_matrices(const MethodRecord& method) {
  std::vector<const MutantRecord*> order;
  for (const auto& mu : method.mutants) {
    if (mu.stmt_id >= method.statements.size()) {
      fail(ErrorKind::data, "mutant '" + mu.mutant_id + "' references unknown stmt_id " + std::to_string(mu.stmt_id));
    }
    order.push_back(&mu);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const MutantRecord* a, const MutantRecord* b) { return a->stmt_id < b->stmt_id; });
  std::vector<MutationMatrix> out;
  out.reserve(order.size());
  for (const MutantRecord* mu : order) {
    out.push_back({mu->mutant_id, mu->stmt_id,
                   build_spectrum_matrix(method.statements.size(), mu->tests, MatrixKind::mutation)});
  }
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> find_bug(const std::vector<ProjectDataset>& projects,
                                                            const std::string& bug_id) {
  for (std::size_t p = 0; p < projects.size(); ++p) {
    for (std::size_t b = 0; b < projects[p].bugs.size(); ++b) {
      if (projects[p].bugs[b].bug_id == bug_id) return std::make_pair(p, b);
    }
  }
  return std::nullopt;
}

}  // namespace covrank
