#pragma once

// Hand-built records shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <string>
#include <vector>

#include "covrank/dataset.hpp"
#include "covrank/minilang.hpp"

namespace covrank::fixtures {

inline StatementRecord stmt(StmtId id, int line, std::string text, int end_line = 0) {
  return {id, line, end_line ? end_line : line, std::move(text), false};
}

inline TestRecord test(std::string id, Outcome outcome, std::vector<StmtId> path) {
  TestRecord t;
  t.test_id = std::move(id);
  t.outcome = outcome;
  t.exec_path = path;
  std::sort(path.begin(), path.end());
  path.erase(std::unique(path.begin(), path.end()), path.end());
  t.covered = path;
  return t;
}

// StringUtils.join with the statement rows of the coverage figure: lines 3,
// 4, 6, 7, 8, 10-11, 13, 14, 15, 17, 18, 21 (rows 0..11). Columns in
// original order: t1, t2 (no coverage), p3 (pass), t9 (fail, EE line 13),
// p4 (pass), t33 (fail, EE line 10-11), t40 (no coverage).
inline MethodRecord join_method() {
  MethodRecord m;
  m.method_id = "StringUtils.join";
  m.statements = {stmt(0, 3, "if (array == null)"),
                  stmt(1, 4, "return null;"),
                  stmt(2, 6, "int noOfItems = (endIndex - startIndex);"),
                  stmt(3, 7, "if (noOfItems <= 0)"),
                  stmt(4, 8, "return EMPTY;"),
                  stmt(5, 10, "StringBuilder buf = new StringBuilder((array[startIndex] == null ? 16 : "
                              "array[startIndex].toString().length()) + 1);",
                       11),
                  stmt(6, 13, "for (int i = startIndex; i < endIndex; i++)"),
                  stmt(7, 14, "if (i > startIndex)"),
                  stmt(8, 15, "buf.append(separator);"),
                  stmt(9, 17, "if (array[i] != null)"),
                  stmt(10, 18, "buf.append(array[i]);"),
                  stmt(11, 21, "return buf.toString();")};
  m.statements[5].is_faulty = true;
  m.is_faulty = true;
  const std::vector<StmtId> full = {0, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  m.tests.push_back(test("StringUtilsTest.t1", Outcome::pass, {}));
  m.tests.push_back(test("StringUtilsTest.t2", Outcome::pass, {}));
  m.tests.push_back(test("StringUtilsTest.p3", Outcome::pass, full));
  auto t9 = test("StringUtilsTest.t9", Outcome::fail, {0, 2, 3, 5, 6, 7, 8, 9, 10, 11});
  t9.error = ErrorMessage{"junit.framework.ComparisonFailure: expected:<a,b> but was:<ab>",
                          {{"org.apache.commons.lang3.StringUtils", "join", 13},
                           {"org.apache.commons.lang3.StringUtilsTest", "t9", 120}}};
  m.tests.push_back(t9);
  m.tests.push_back(test("StringUtilsTest.p4", Outcome::pass, full));
  auto t33 = test("StringUtilsTest.t33", Outcome::fail, {0, 2, 3, 5, 6});
  t33.error = ErrorMessage{"java.lang.NullPointerException",
                           {{"org.apache.commons.lang3.StringUtils", "join", 11},
                            {"org.apache.commons.lang3.StringUtilsTest", "t33", 310}}};
  m.tests.push_back(t33);
  m.tests.push_back(test("StringUtilsTest.t40", Outcome::pass, {}));
  return m;
}

inline constexpr std::size_t kJoinT9 = 3;
inline constexpr std::size_t kJoinT33 = 5;

// GrayPaintScale.getPaint: the failing test's trace names getPaint at line
// 128, the return statement (stmt 3).
inline MethodRecord get_paint_method() {
  MethodRecord m;
  m.method_id = "org.jfree.chart.renderer.GrayPaintScale.getPaint";
  m.statements = {stmt(0, 124, "double v = Math.max(value, this.lowerBound);"),
                  stmt(1, 125, "v = Math.min(v, this.upperBound);"),
                  stmt(2, 126, "int g = (int) ((value - this.lowerBound) / (this.upperBound - this.lowerBound) * 255.0);",
                       127),
                  stmt(3, 128, "return new Color(g, g, g);")};
  m.statements[2].is_faulty = true;
  m.is_faulty = true;
  m.tests.push_back(test("GrayPaintScaleTests.testGetPaint2", Outcome::pass, {0, 1, 2, 3}));
  auto t = test("GrayPaintScaleTests.testGetPaint", Outcome::fail, {0, 1, 2, 3});
  t.error = ErrorMessage{"java.lang.IllegalArgumentException: Color parameter outside of expected range: Red Green Blue",
                         {{"java.awt.Color", "testColorValueRange", 310},
                          {"java.awt.Color", "<init>", 395},
                          {"org.jfree.chart.renderer.GrayPaintScale", "getPaint", 128},
                          {"org.jfree.chart.renderer.junit.GrayPaintScaleTests", "testGetPaint", 98}}};
  m.tests.push_back(t);
  return m;
}

// Same method; the trace never mentions it and the path ends at stmt 2.
inline MethodRecord get_paint_fallback_method() {
  MethodRecord m = get_paint_method();
  auto& t = m.tests[1];
  t.exec_path = {0, 1, 2};
  t.covered = {0, 1, 2};
  t.error = ErrorMessage{"java.lang.IllegalArgumentException",
                         {{"java.awt.Color", "<init>", 395},
                          {"org.jfree.chart.renderer.junit.GrayPaintScaleTests", "testGetPaint", 98}}};
  return m;
}

// The running example with the interdependent statements; the faulty
// condition reads `i < y + 4` where the reference has `i < y + 7`.
// Statements (0-based): 0 i=, 1 j=, 2 m=5, 3 if i<y+4, 4 if j>5&&z>j,
// 5 m=m+z, 6 m=m+j, 7 m=m+i, 8 i=m+1, 9 return m.
inline const char* kComputeSource =
    "int compute(int x, int y, int z) {\n"
    "    int i = x + 1;\n"
    "    int j = x + y;\n"
    "    int m = 5;\n"
    "    if (i < y + 4) {\n"
    "        if (j > 5 && z > j) {\n"
    "            m = m + z;\n"
    "        } else {\n"
    "            m = m + j;\n"
    "        }\n"
    "    } else {\n"
    "        m = m + i;\n"
    "    }\n"
    "    i = m + 1;\n"
    "    return m;\n"
    "}\n";

inline mini::MiniProgram compute_program() { return mini::parse_program(kComputeSource); }

inline mini::MiniProgram compute_reference() {
  auto p = compute_program();
  mini::statement_at(p, 3).cond.terms[0].rhs.args[1] = mini::Expr::lit(7);
  return p;
}

}  // namespace covrank::fixtures
