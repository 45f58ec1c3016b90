#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace covrank {

inline constexpr const char* kDatasetSchema = "fl-dataset/v1";

using StmtId = std::size_t;

struct StatementRecord {
  StmtId stmt_id = 0;
  int line = 1;
  int end_line = 1;  // last source line of a multi-line statement; equals line otherwise
  std::string text;
  bool is_faulty = false;

  bool operator==(const StatementRecord&) const = default;
};

struct StackFrame {
  std::string class_name;
  std::string method_name;
  int line = 1;

  bool operator==(const StackFrame&) const = default;
};

struct ErrorMessage {
  std::string message;
  std::vector<StackFrame> frames;

  bool operator==(const ErrorMessage&) const = default;
};

enum class Outcome { pass, fail };

struct TestRecord {
  std::string test_id;
  Outcome outcome = Outcome::pass;
  std::vector<StmtId> covered;    // sorted, unique
  std::vector<StmtId> exec_path;  // interpreted order, repeats allowed
  std::optional<ErrorMessage> error;

  bool failed() const { return outcome == Outcome::fail; }
  bool operator==(const TestRecord&) const = default;
};

struct AstNode {
  std::string kind;
  std::optional<std::string> token;
  std::vector<AstNode> children;

  bool is_leaf() const { return children.empty(); }
  bool operator==(const AstNode&) const = default;
};

struct MutantRecord {
  std::string mutant_id;
  StmtId stmt_id = 0;
  std::string op;
  std::vector<TestRecord> tests;

  bool operator==(const MutantRecord&) const = default;
};

struct MethodFacets {
  std::string qualified_name;
  std::string accessed_classes;
  std::string invocations;
  std::string variables;
  std::string comments;

  bool operator==(const MethodFacets&) const = default;
};

struct MethodRecord {
  std::string method_id;
  bool is_faulty = false;
  std::vector<StatementRecord> statements;
  AstNode ast;
  std::vector<std::pair<StmtId, StmtId>> dfg_edges;
  std::vector<TestRecord> tests;
  std::vector<MutantRecord> mutants;
  MethodFacets facets;
  /// Optional externally supplied coverage cells (rows = statements).
  std::optional<std::vector<std::vector<int>>> coverage;

  std::size_t statement_count() const { return statements.size(); }
  std::size_t test_count() const { return tests.size(); }
  bool operator==(const MethodRecord&) const = default;
};

struct FailingTestFacets {
  std::string names;
  std::string source;
  std::string messages;

  bool operator==(const FailingTestFacets&) const = default;
};

struct BugRecord {
  std::string bug_id;
  std::vector<MethodRecord> methods;
  FailingTestFacets failing_test_facets;
  std::optional<bool> tie_heavy;

  bool operator==(const BugRecord&) const = default;
};

struct ProjectDataset {
  std::string project;
  std::vector<BugRecord> bugs;

  bool operator==(const ProjectDataset&) const = default;
};

enum class MatrixKind { spectrum, mutation };

/// Statement x test matrix over {1, 0, -1}. Cells are addressed by original
/// test index; col_order[p] names the test shown at column position p.
struct CoverageMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int8_t> cells;
  std::vector<std::size_t> col_order;
  MatrixKind kind = MatrixKind::spectrum;

  CoverageMatrix() = default;
  CoverageMatrix(std::size_t rows, std::size_t cols, MatrixKind kind = MatrixKind::spectrum);

  std::int8_t& at(std::size_t row, std::size_t test) { return cells[row * cols + test]; }
  std::int8_t at(std::size_t row, std::size_t test) const { return cells[row * cols + test]; }
  /// Cell at display position p.
  std::int8_t ordered(std::size_t row, std::size_t p) const { return cells[row * cols + col_order[p]]; }

  /// Throws Error(data) if any cell is outside {1,0,-1}, col_order is not a
  /// permutation, or a column holds more than one -1 (unless allow_multi_ee).
  void validate(bool allow_multi_ee = false) const;

  bool operator==(const CoverageMatrix&) const = default;
};

// Validation. Each throws Error(data) naming the offending bug/method/field.
void validate_method(const MethodRecord& m, const std::string& bug_id);
void validate_bug(const BugRecord& b);
void validate_dataset(const ProjectDataset& d);

/// cell[i][j] = 1 iff statement i is covered by test j; col_order = identity.
CoverageMatrix build_spectrum_matrix(const MethodRecord& method);

/// Same construction over a list of test records for a method with m statements.
CoverageMatrix build_spectrum_matrix(std::size_t statements, const std::vector<TestRecord>& tests,
                                     MatrixKind kind = MatrixKind::spectrum);

struct MutationMatrix {
  std::string mutant_id;
  StmtId stmt_id = 0;
  CoverageMatrix matrix;
};

/// One matrix per mutant, ordered by stmt_id (stable within a statement).
std::vector<MutationMatrix> build_mutation_matrices(const MethodRecord& method);

// fl-dataset/v1 JSON I/O. Output is canonical: sorted keys, fixed layout.
ProjectDataset load_dataset(const std::filesystem::path& path);
ProjectDataset parse_dataset(const std::string& text, const std::string& origin = "<memory>");
void save_dataset(const ProjectDataset& dataset, const std::filesystem::path& path);
std::string dataset_to_string(const ProjectDataset& dataset);

/// Loads a single file, or every *.json file of a directory in name order.
std::vector<ProjectDataset> load_datasets(const std::filesystem::path& path);

/// Finds a bug by id across projects; returns the (project, bug) indices.
std::optional<std::pair<std::size_t, std::size_t>> find_bug(const std::vector<ProjectDataset>& projects,
                                                            const std::string& bug_id);

}  // namespace covrank
