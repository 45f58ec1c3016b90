#pragma once

// A small integer-only imperative language standing in for real subject
// programs. Programs are a parameter list and a statement body; every
// assignment, if-header, while-header and return is one statement, numbered
// in preorder. Arithmetic wraps on 64-bit overflow; division by zero and
// exceeding a loop's iteration cap are runtime crashes.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "covrank/dataset.hpp"

namespace covrank::mini {

enum class BinOp { add, sub, mul, div };
enum class CmpOp { lt, le, gt, ge, eq, ne };

std::string_view to_string(BinOp op);
std::string_view to_string(CmpOp op);

struct Expr {
  enum class Kind { lit, var, bin };
  Kind kind = Kind::lit;
  std::int64_t value = 0;
  std::string name;
  BinOp op = BinOp::add;
  std::vector<Expr> args;  // two operands for bin

  static Expr lit(std::int64_t v);
  static Expr var(std::string n);
  static Expr bin(BinOp op, Expr l, Expr r);

  bool operator==(const Expr&) const = default;
};

struct Comparison {
  CmpOp op = CmpOp::lt;
  Expr lhs;
  Expr rhs;

  bool operator==(const Comparison&) const = default;
};

/// Conjunction of comparisons.
struct Cond {
  std::vector<Comparison> terms;

  bool operator==(const Cond&) const = default;
};

struct Stmt {
  enum class Kind { assign, if_, while_, ret };
  Kind kind = Kind::assign;
  std::string var;      // assign target
  bool declares = false;  // first definition of var (printed with "int")
  Expr expr;            // assign value / return value
  Cond cond;            // if / while
  std::vector<Stmt> then_body;  // if-then / while body
  std::vector<Stmt> else_body;
  int max_iters = 10;   // while loops only

  bool operator==(const Stmt&) const = default;
};

struct MiniProgram {
  std::string name = "compute";
  std::vector<std::string> params;
  std::vector<Stmt> body;

  bool operator==(const MiniProgram&) const = default;
};

/// Preorder view of a program's statements.
struct FlatStmt {
  const Stmt* stmt = nullptr;
  StmtId id = 0;
  int line = 0;  // relative line (signature is line 1)
  std::string text;
};

std::vector<FlatStmt> flatten(const MiniProgram& p);
std::size_t statement_count(const MiniProgram& p);

/// Source text, one statement per line, braces on their own lines.
std::string print_program(const MiniProgram& p);
std::string print_expr(const Expr& e);
std::string print_cond(const Cond& c);

/// Parses the syntax produced by print_program. Throws Error(data).
MiniProgram parse_program(const std::string& text);

struct ExecResult {
  std::optional<std::int64_t> value;  // absent on crash
  std::vector<StmtId> path;
  bool crashed = false;
  StmtId crash_stmt = 0;
  std::string crash_reason;
};

ExecResult run(const MiniProgram& p, const std::vector<std::int64_t>& inputs);

/// Variables defined (params and top-level declarations) before statement id.
std::vector<std::string> variables_in_scope(const MiniProgram& p, StmtId id);

/// Reaching-definition data-flow edges (def stmt -> use stmt), sorted.
std::vector<std::pair<StmtId, StmtId>> build_dfg(const MiniProgram& p);

/// Control-flow successors per statement; kExit marks leaving the method.
inline constexpr StmtId kExit = static_cast<StmtId>(-1);
std::vector<std::vector<StmtId>> control_flow(const MiniProgram& p);

/// Variables defined / used by a single statement.
std::optional<std::string> defined_var(const Stmt& s);
std::vector<std::string> used_vars(const Stmt& s);

AstNode to_ast(const MiniProgram& p);

Stmt& statement_at(MiniProgram& p, StmtId id);
const Stmt& statement_at(const MiniProgram& p, StmtId id);

enum class FaultKind { wrong_operator, wrong_variable, wrong_constant, wrong_comparison };

std::string_view to_string(FaultKind k);

/// Replaces one site of the target statement. site indexes the matching
/// occurrences in preorder: arithmetic operators, variable uses, integer
/// literals, or comparisons. For wrong_comparison, replacement is either a
/// comparison operator or an integer that replaces the first literal of the
/// comparison's right-hand side.
struct FaultSpec {
  FaultKind kind = FaultKind::wrong_constant;
  StmtId target_stmt = 0;
  std::size_t site = 0;
  std::string replacement;

  std::string detail() const;
};

/// Throws Error(data) when the fault does not apply or changes nothing.
MiniProgram inject_fault(const MiniProgram& p, const FaultSpec& spec);

/// Mutation operators applied by the benchmark generator.
enum class Mutator { arith_replace, rel_replace, const_plus_one };
std::string_view to_string(Mutator m);
std::optional<Mutator> mutator_from_string(std::string_view s);

/// Applies the mutator at the first applicable site; nullopt if none.
std::optional<MiniProgram> mutate(const MiniProgram& p, StmtId target, Mutator m);

}  // namespace covrank::mini
