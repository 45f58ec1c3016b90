#include "covrank/ee_matrix.hpp"

#include "covrank/error.hpp"

namespace covrank {

namespace {

std::string short_name(const std::string& id) {
  const auto dot = id.rfind('.');
  return dot == std::string::npos ? id : id.substr(dot + 1);
}

std::string class_part(const std::string& id) {
  const auto dot = id.rfind('.');
  if (dot == std::string::npos) return {};
  const std::string cls = id.substr(0, dot);
  const auto inner = cls.rfind('.');
  return inner == std::string::npos ? cls : cls.substr(inner + 1);
}

std::optional<StmtId> statement_at_line(const MethodRecord& m, int line) {
  for (const auto& s : m.statements) {
    if (line >= s.line && line <= s.end_line) return s.stmt_id;
  }
  return std::nullopt;
}

}  // namespace

EeResolution resolve_ee(const MethodRecord& method, const TestRecord& test, std::size_t test_index) {
  if (!test.failed()) {
    fail(ErrorKind::data, "resolve_ee: test '" + test.test_id + "' of method '" + method.method_id + "' passed");
  }
  EeResolution r{test.test_id, test_index, std::nullopt, EeSource::frame_match};
  const std::string name = short_name(method.method_id);
  const std::string cls = class_part(method.method_id);
  if (test.error) {
    for (const auto& f : test.error->frames) {
      if (f.method_name != name) continue;
      if (!cls.empty() && !f.class_name.empty() && short_name(f.class_name) != cls) continue;
      if (auto s = statement_at_line(method, f.line)) {
        r.stmt_id = s;
        return r;
      }
    }
  }
  if (test.exec_path.empty()) {
    fail(ErrorKind::data, "resolve_ee: test '" + test.test_id + "' has no matching frame and an empty exec_path");
  }
  r.stmt_id = test.exec_path.back();
  r.source = EeSource::exec_path_fallback;
  return r;
}

std::vector<EeResolution> resolve_all(const MethodRecord& method, const std::vector<TestRecord>& tests) {
  std::vector<EeResolution> out;
  for (std::size_t j = 0; j < tests.size(); ++j) {
    const auto& t = tests[j];
    if (!t.failed()) continue;
    try {
      out.push_back(resolve_ee(method, t, j));
    } catch (const Error&) {
      out.push_back({t.test_id, j, std::nullopt, EeSource::exec_path_fallback});
    }
  }
  return out;
}

CoverageMatrix mark_ee(const CoverageMatrix& matrix, const std::vector<EeResolution>& resolutions,
                       std::span<const Outcome> outcomes, EeMode mode) {
  if (outcomes.size() != matrix.cols) fail(ErrorKind::data, "mark_ee: outcome count differs from column count");
  CoverageMatrix out = matrix;
  for (const auto& r : resolutions) {
    if (r.test_index >= matrix.cols) fail(ErrorKind::data, "mark_ee: column " + std::to_string(r.test_index));
    if (outcomes[r.test_index] != Outcome::fail) {
      fail(ErrorKind::data, "mark_ee: resolution for passing column " + std::to_string(r.test_index) + " ('" +
                                r.test_id + "')");
    }
    if (!r.stmt_id) continue;
    if (*r.stmt_id >= matrix.rows) fail(ErrorKind::data, "mark_ee: row " + std::to_string(*r.stmt_id));
    if (mode == EeMode::cell) {
      out.at(*r.stmt_id, r.test_index) = -1;
    } else {
      for (std::size_t j = 0; j < out.cols; ++j) out.at(*r.stmt_id, j) = -1;
    }
  }
  return out;
}

namespace {

struct ColumnFacts {
  long ee_row = -1;    // row of the column's -1 (highest when several)
  long last_one = -1;  // highest row holding a 1
  std::size_t ones = 0;
};

}  // namespace

CoverageMatrix order_tests(const CoverageMatrix& matrix) {
  const std::size_t n = matrix.cols, m = matrix.rows;
  std::vector<ColumnFacts> facts(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const int v = matrix.at(i, j);
      if (v == -1) facts[j].ee_row = static_cast<long>(i);
      if (v == 1) {
        facts[j].last_one = static_cast<long>(i);
        ++facts[j].ones;
      }
    }
  }
  auto shared = [&](std::size_t a, std::size_t b) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < m; ++i) c += matrix.at(i, a) == 1 && matrix.at(i, b) == 1;
    return c;
  };
  // Candidate a beats b on (key, last_one, lower index).
  auto better = [&](std::size_t a, long ka, std::size_t b, long kb) {
    if (ka != kb) return ka > kb;
    if (facts[a].last_one != facts[b].last_one) return facts[a].last_one > facts[b].last_one;
    return a < b;
  };

  std::vector<bool> left(n, true);
  std::vector<std::size_t> order;
  order.reserve(n);
  auto take = [&](std::size_t j) {
    left[j] = false;
    order.push_back(j);
  };

  while (order.size() < n) {
    bool any_ee = false;
    for (std::size_t j = 0; j < n; ++j) any_ee |= left[j] && facts[j].ee_row >= 0;
    if (any_ee) {
      std::optional<std::size_t> best;
      for (std::size_t j = 0; j < n; ++j) {
        if (!left[j] || facts[j].ee_row < 0) continue;
        if (!best || better(j, facts[j].ee_row, *best, facts[*best].ee_row)) best = j;
      }
      take(*best);
      const long row = facts[*best].ee_row;
      for (;;) {
        std::optional<std::size_t> next;
        for (std::size_t j = 0; j < n; ++j) {
          if (!left[j] || facts[j].ee_row != row) continue;
          if (!next || better(j, 0, *next, 0)) next = j;
        }
        if (!next) break;
        take(*next);
      }
    } else {
      std::optional<std::size_t> best;
      for (std::size_t j = 0; j < n; ++j) {
        if (!left[j]) continue;
        const long k = static_cast<long>(facts[j].ones);
        if (!best || better(j, k, *best, static_cast<long>(facts[*best].ones))) best = j;
      }
      take(*best);
      std::size_t last = *best;
      for (;;) {
        std::optional<std::size_t> next;
        long next_k = 0;
        for (std::size_t j = 0; j < n; ++j) {
          if (!left[j]) continue;
          const long k = static_cast<long>(shared(last, j));
          if (!next || better(j, k, *next, next_k)) {
            next = j;
            next_k = k;
          }
        }
        if (!next || next_k == 0) break;
        take(*next);
        last = *next;
      }
    }
  }
  CoverageMatrix out = matrix;
  out.col_order = std::move(order);
  return out;
}

std::vector<Outcome> outcomes_of(const std::vector<TestRecord>& tests) {
  std::vector<Outcome> out;
  out.reserve(tests.size());
  for (const auto& t : tests) out.push_back(t.outcome);
  return out;
}

std::string render_matrix(const CoverageMatrix& matrix) {
  std::string out;
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    for (std::size_t p = 0; p < matrix.cols; ++p) {
      const int v = matrix.ordered(i, p);
      out += v == 1 ? '#' : v == -1 ? '*' : '.';
    }
    out += '\n';
  }
  return out;
}

}  // namespace covrank
