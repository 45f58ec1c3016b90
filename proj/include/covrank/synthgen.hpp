#pragma once

// Synthetic buggy-program benchmark: random mini-language methods, injected
// faults, interpreted tests and mutants, emitted as fl-dataset/v1 records.

#include <cstdint>
#include <string>
#include <vector>

#include "covrank/dataset.hpp"
#include "covrank/minilang.hpp"
#include "covrank/rng.hpp"

namespace covrank::synth {

inline constexpr std::size_t kMinProgramSize = 5;
inline constexpr std::size_t kMaxProgramSize = 60;

/// Random well-formed program with exactly `size` statements (5..60).
mini::MiniProgram generate_program(std::uint64_t seed, std::size_t size);

/// Random fault for prog. The result always applies to prog.
mini::FaultSpec random_fault(const mini::MiniProgram& prog, Rng& rng);

struct TestContext {
  std::string test_id = "SubjectTest.test0";
  std::string class_name = "Subject";
  int first_line = 1;  // source line of the method signature
};

/// Interprets prog and compares the return value with reference_output.
TestRecord execute_test(const mini::MiniProgram& prog, const std::vector<std::int64_t>& inputs,
                        std::int64_t reference_output, const TestContext& ctx = {});

/// Statement records for prog laid out from first_line, faulty stmt flagged.
std::vector<StatementRecord> statement_records(const mini::MiniProgram& prog, int first_line,
                                               std::optional<StmtId> faulty = std::nullopt);

struct BenchmarkConfig {
  std::uint64_t seed = 1;
  std::size_t bugs = 200;
  std::size_t projects = 10;
  std::size_t tests_per_bug = 12;
  std::size_t distractors = 5;
  std::size_t min_size = 6;
  std::size_t max_size = 16;
  std::vector<mini::Mutator> mutators = {mini::Mutator::arith_replace, mini::Mutator::rel_replace,
                                         mini::Mutator::const_plus_one};
  double p_faulty_invoked = 0.85;
  double p_other_invoked = 0.6;
  std::int64_t input_range = 8;
  std::size_t resample_budget = 200;
};

/// One bug of a project. Deterministic in (config.seed, project, index).
BugRecord generate_bug(const BenchmarkConfig& config, std::size_t project, std::size_t index);

/// Bugs are split across projects as evenly as possible; project p gets
/// bugs whose global index i satisfies i % projects == p.
std::vector<ProjectDataset> generate_benchmark(const BenchmarkConfig& config);

std::string project_name(std::size_t project);

/// True when the faulty statement's spectrum row equals at least two other
/// rows of the faulty method.
bool is_tie_heavy(const BugRecord& bug);

}  // namespace covrank::synth
