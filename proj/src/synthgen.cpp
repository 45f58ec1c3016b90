#include "covrank/synthgen.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <thread>

#include "covrank/error.hpp"

namespace covrank::synth {

using mini::BinOp;
using mini::CmpOp;
using mini::Comparison;
using mini::Cond;
using mini::Expr;
using mini::MiniProgram;
using mini::Stmt;

namespace {

constexpr std::array kLocals = {"acc", "tmp", "total", "delta", "step", "base", "mid", "gap", "sum", "diff", "span", "cap"};
constexpr std::array kCounters = {"k", "q"};
constexpr std::array kParams = {"x", "y", "z"};

class ProgramGen {
 public:
  explicit ProgramGen(std::uint64_t seed) : rng_(derive_seed(seed, 0x9a11)) {}

  MiniProgram make(std::size_t size) {
    MiniProgram p;
    const std::size_t nparams = 2 + rng_.below(2);
    for (std::size_t i = 0; i < nparams; ++i) p.params.push_back(kParams[i]);
    scope_ = p.params;
    p.body = block(size - 1, 0, true);
    Stmt ret;
    ret.kind = Stmt::Kind::ret;
    ret.expr = return_expr();
    p.body.push_back(std::move(ret));
    return p;
  }

 private:
  Rng rng_;
  std::vector<std::string> scope_;   // readable variables
  std::vector<std::string> locals_;  // assignable locals
  std::vector<std::string> recent_;  // assignment targets in order
  std::size_t counters_ = 0;
  bool branched_ = false;

  Expr leaf(const std::vector<std::string>& vars) {
    if (!vars.empty() && rng_.chance(0.65)) return Expr::var(rng_.pick(vars));
    return Expr::lit(rng_.range(1, 9));
  }

  Expr expr(int depth) {
    if (depth <= 0 || rng_.chance(0.35)) return leaf(scope_);
    const double r = rng_.uniform();
    if (r < 0.42) return Expr::bin(BinOp::add, expr(depth - 1), leaf(scope_));
    if (r < 0.72) return Expr::bin(BinOp::sub, expr(depth - 1), leaf(scope_));
    if (r < 0.9) return Expr::bin(BinOp::mul, leaf(scope_), Expr::lit(rng_.range(2, 3)));
    return Expr::bin(BinOp::div, expr(depth - 1), Expr::lit(rng_.range(2, 5)));
  }

  Comparison comparison() {
    static constexpr std::array ops = {CmpOp::lt, CmpOp::le, CmpOp::gt, CmpOp::ge, CmpOp::eq, CmpOp::ne};
    Comparison c;
    c.lhs = Expr::var(rng_.pick(scope_));
    c.op = ops[rng_.below(rng_.chance(0.8) ? 4 : 6)];
    if (rng_.chance(0.5)) {
      c.rhs = Expr::lit(rng_.range(-3, 6));
    } else {
      c.rhs = Expr::bin(BinOp::add, Expr::var(rng_.pick(scope_)), Expr::lit(rng_.range(1, 5)));
    }
    return c;
  }

  Expr return_expr() {
    if (recent_.empty()) return expr(2);
    const std::string last = recent_.back();
    if (recent_.size() >= 2 && rng_.chance(0.5)) {
      return Expr::bin(BinOp::add, Expr::var(last), Expr::var(recent_[recent_.size() - 2]));
    }
    return Expr::var(last);
  }

  Stmt assignment(bool top) {
    Stmt s;
    s.kind = Stmt::Kind::assign;
    s.expr = expr(2);
    const bool room = locals_.size() < kLocals.size();
    if (top && room && (locals_.size() < 2 || rng_.chance(0.45))) {
      s.var = kLocals[locals_.size()];
      s.declares = true;
      locals_.push_back(s.var);
      scope_.push_back(s.var);
    } else if (!locals_.empty()) {
      s.var = rng_.pick(locals_);
    } else {
      s.var = rng_.pick(std::vector<std::string>(kParams.begin(), kParams.begin() + 2));
    }
    recent_.push_back(s.var);
    return s;
  }

  std::vector<Stmt> block(std::size_t budget, int depth, bool top) {
    std::vector<Stmt> out;
    while (budget > 0) {
      const std::size_t r = budget;
      if (top && r >= 4 && counters_ < kCounters.size() && rng_.chance(0.18)) {
        const std::size_t body = 1 + rng_.below(std::min<std::size_t>(r - 3, 4));
        const std::string k = kCounters[counters_++];
        Stmt init;
        init.kind = Stmt::Kind::assign;
        init.var = k;
        init.declares = true;
        init.expr = Expr::lit(0);
        out.push_back(std::move(init));
        scope_.push_back(k);
        Stmt loop;
        loop.kind = Stmt::Kind::while_;
        loop.cond.terms.push_back({CmpOp::lt, Expr::var(k), Expr::lit(rng_.range(2, 4))});
        loop.then_body = block(body, depth + 1, false);
        Stmt inc;
        inc.kind = Stmt::Kind::assign;
        inc.var = k;
        inc.expr = Expr::bin(BinOp::add, Expr::var(k), Expr::lit(1));
        loop.then_body.push_back(std::move(inc));
        out.push_back(std::move(loop));
        branched_ = true;
        budget -= body + 3;
      } else if (r >= 2 && depth < 2 && (rng_.chance(0.3) || (top && !branched_ && r <= 3))) {
        const std::size_t then_n = 1 + rng_.below(std::min<std::size_t>(r - 1, 5));
        const std::size_t rem = r - 1 - then_n;
        const std::size_t else_n = (rem >= 1 && rng_.chance(0.6)) ? 1 + rng_.below(std::min<std::size_t>(rem, 4)) : 0;
        Stmt s;
        s.kind = Stmt::Kind::if_;
        s.cond.terms.push_back(comparison());
        if (rng_.chance(0.15)) s.cond.terms.push_back(comparison());
        s.then_body = block(then_n, depth + 1, false);
        if (else_n) s.else_body = block(else_n, depth + 1, false);
        out.push_back(std::move(s));
        branched_ = true;
        budget -= 1 + then_n + else_n;
      } else {
        out.push_back(assignment(top));
        budget -= 1;
      }
    }
    return out;
  }
};

// Sites a statement evaluates, in preorder.
void expr_nodes(const Expr& e, Expr::Kind kind, std::vector<const Expr*>& out) {
  if (e.kind == kind) out.push_back(&e);
  for (const auto& a : e.args) expr_nodes(a, kind, out);
}

std::vector<const Expr*> stmt_nodes(const Stmt& s, Expr::Kind kind) {
  std::vector<const Expr*> out;
  if (s.kind == Stmt::Kind::assign || s.kind == Stmt::Kind::ret) {
    expr_nodes(s.expr, kind, out);
  } else {
    for (const auto& t : s.cond.terms) {
      expr_nodes(t.lhs, kind, out);
      expr_nodes(t.rhs, kind, out);
    }
  }
  return out;
}

}  // namespace

MiniProgram generate_program(std::uint64_t seed, std::size_t size) {
  if (size < kMinProgramSize || size > kMaxProgramSize) {
    fail(ErrorKind::config, "program size " + std::to_string(size) + " outside [5, 60]");
  }
  return ProgramGen(seed).make(size);
}

mini::FaultSpec random_fault(const MiniProgram& prog, Rng& rng) {
  using mini::FaultKind;
  struct Candidate {
    FaultKind kind;
    StmtId stmt;
    std::size_t site;
  };
  std::vector<Candidate> cands;
  const auto flat = mini::flatten(prog);
  for (const auto& f : flat) {
    const Stmt& s = *f.stmt;
    const auto bins = stmt_nodes(s, Expr::Kind::bin);
    for (std::size_t i = 0; i < bins.size(); ++i) cands.push_back({FaultKind::wrong_operator, f.id, i});
    const auto vars = stmt_nodes(s, Expr::Kind::var);
    if (mini::variables_in_scope(prog, f.id).size() >= 2) {
      for (std::size_t i = 0; i < vars.size(); ++i) cands.push_back({FaultKind::wrong_variable, f.id, i});
    }
    const auto lits = stmt_nodes(s, Expr::Kind::lit);
    for (std::size_t i = 0; i < lits.size(); ++i) cands.push_back({FaultKind::wrong_constant, f.id, i});
    if (s.kind == Stmt::Kind::if_ || s.kind == Stmt::Kind::while_) {
      for (std::size_t i = 0; i < s.cond.terms.size(); ++i) cands.push_back({FaultKind::wrong_comparison, f.id, i});
    }
  }
  if (cands.empty()) fail(ErrorKind::data, "program admits no fault");
  for (;;) {
    const Candidate c = rng.pick(cands);
    const Stmt& s = *flat[c.stmt].stmt;
    mini::FaultSpec spec{c.kind, c.stmt, c.site, ""};
    switch (c.kind) {
      case FaultKind::wrong_operator: {
        const BinOp cur = stmt_nodes(s, Expr::Kind::bin)[c.site]->op;
        std::vector<std::string> alts;
        for (BinOp op : {BinOp::add, BinOp::sub, BinOp::mul}) {
          if (op != cur) alts.emplace_back(mini::to_string(op));
        }
        spec.replacement = rng.pick(alts);
        break;
      }
      case FaultKind::wrong_variable: {
        const std::string cur = stmt_nodes(s, Expr::Kind::var)[c.site]->name;
        std::vector<std::string> alts;
        for (const auto& v : mini::variables_in_scope(prog, c.stmt)) {
          if (v != cur) alts.push_back(v);
        }
        spec.replacement = rng.pick(alts);
        break;
      }
      case FaultKind::wrong_constant: {
        const std::int64_t cur = stmt_nodes(s, Expr::Kind::lit)[c.site]->value;
        std::int64_t delta = rng.range(1, 3);
        if (rng.chance(0.5)) delta = -delta;
        spec.replacement = std::to_string(cur + delta);
        break;
      }
      case FaultKind::wrong_comparison: {
        const Comparison& cmp = s.cond.terms[c.site];
        std::vector<const Expr*> lits;
        expr_nodes(cmp.rhs, Expr::Kind::lit, lits);
        if (lits.empty()) expr_nodes(cmp.lhs, Expr::Kind::lit, lits);
        if (!lits.empty() && rng.chance(0.5)) {
          std::int64_t delta = rng.range(1, 3);
          if (rng.chance(0.5)) delta = -delta;
          spec.replacement = std::to_string(lits[0]->value + delta);
        } else {
          std::vector<std::string> alts;
          for (CmpOp op : {CmpOp::lt, CmpOp::le, CmpOp::gt, CmpOp::ge, CmpOp::eq, CmpOp::ne}) {
            if (op != cmp.op) alts.emplace_back(mini::to_string(op));
          }
          spec.replacement = rng.pick(alts);
        }
        break;
      }
    }
    return spec;
  }
}

std::vector<StatementRecord> statement_records(const MiniProgram& prog, int first_line, std::optional<StmtId> faulty) {
  std::vector<StatementRecord> out;
  for (const auto& f : mini::flatten(prog)) {
    const int line = first_line - 1 + f.line;
    out.push_back({f.id, line, line, f.text, faulty && *faulty == f.id});
  }
  return out;
}

namespace {

std::vector<StmtId> covered_of(const std::vector<StmtId>& path) {
  std::vector<StmtId> c(path);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

std::string failure_message(const mini::ExecResult& r, std::int64_t expected) {
  if (r.crashed) {
    if (r.crash_reason.rfind("ArithmeticException", 0) == 0) return "java.lang." + r.crash_reason;
    return "java.lang.IllegalStateException: " + r.crash_reason;
  }
  return "junit.framework.AssertionFailedError: expected:<" + std::to_string(expected) + "> but was:<" +
         std::to_string(*r.value) + ">";
}

bool mismatch(const mini::ExecResult& r, std::int64_t expected) { return r.crashed || !r.value || *r.value != expected; }

}  // namespace

TestRecord execute_test(const MiniProgram& prog, const std::vector<std::int64_t>& inputs, std::int64_t reference_output,
                        const TestContext& ctx) {
  const auto r = mini::run(prog, inputs);
  TestRecord t;
  t.test_id = ctx.test_id;
  t.exec_path = r.path;
  t.covered = covered_of(r.path);
  if (mismatch(r, reference_output)) {
    t.outcome = Outcome::fail;
    const auto flat = mini::flatten(prog);
    const StmtId at = r.crashed ? r.crash_stmt : r.path.back();
    ErrorMessage e;
    e.message = failure_message(r, reference_output);
    e.frames.push_back({ctx.class_name, prog.name, ctx.first_line - 1 + flat[at].line});
    t.error = std::move(e);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Benchmark

namespace {

constexpr std::array kVerbs = {"compute", "scale",  "merge",   "adjust",  "count",  "clamp",  "blend",
                               "shift",   "score",  "measure", "balance", "reduce", "offset", "weigh",
                               "rotate",  "project", "normalize", "estimate", "resolve", "accumulate"};
constexpr std::array kNouns = {"Total", "Range",  "Delta", "Index", "Width", "Height", "Margin",
                               "Price", "Weight", "Limit", "Bonus", "Ratio", "Step",   "Span",
                               "Level", "Depth",  "Budget", "Score", "Factor", "Quota"};
constexpr std::array kClasses = {"Ledger", "Gauge", "Planner", "Meter", "Tally", "Router", "Mixer", "Scaler",
                                 "Binder", "Sorter", "Tracker", "Counter"};
constexpr std::array kHelpers = {"Math.abs", "Math.max", "Math.min", "Objects.hash", "List.size",
                                 "Map.get",  "Buffer.append", "Integer.parseInt"};
constexpr std::array kWords = {"value", "input", "bound", "result", "update", "check", "current",
                               "limit", "offset", "window", "ratio", "state", "entry", "record"};

struct TestPlan {
  std::string test_id;
  std::string test_method;
  int test_line = 1;
  std::vector<std::size_t> order;  // invoked methods, in call order
  std::vector<std::vector<std::int64_t>> inputs;  // per method (empty when not invoked)
  std::vector<std::int64_t> expected;             // per method
};

struct MethodSlot {
  std::string name;
  MiniProgram original;
  MiniProgram current;  // faulty version for the faulty method
  int first_line = 1;
};

struct TestRun {
  std::vector<std::optional<mini::ExecResult>> runs;  // per method
  bool failed = false;
  std::size_t failing_method = 0;
};

TestRun run_test(const TestPlan& plan, const std::vector<const MiniProgram*>& progs,
                 const TestRun* base = nullptr, std::optional<std::size_t> changed = std::nullopt) {
  TestRun out;
  out.runs.resize(progs.size());
  for (std::size_t m : plan.order) {
    if (base && changed && m != *changed && base->runs[m]) {
      out.runs[m] = base->runs[m];
    } else {
      out.runs[m] = mini::run(*progs[m], plan.inputs[m]);
    }
    if (mismatch(*out.runs[m], plan.expected[m])) {
      out.failed = true;
      out.failing_method = m;
      break;
    }
  }
  return out;
}

TestRecord to_record(const TestPlan& plan, const TestRun& run, std::size_t method, const std::vector<MethodSlot>& slots,
                     const std::vector<const MiniProgram*>& progs, const std::string& cls) {
  TestRecord t;
  t.test_id = plan.test_id;
  if (run.runs[method]) {
    t.exec_path = run.runs[method]->path;
    t.covered = covered_of(t.exec_path);
  }
  if (run.failed) {
    t.outcome = Outcome::fail;
    const std::size_t fm = run.failing_method;
    const auto& r = *run.runs[fm];
    const auto flat = mini::flatten(*progs[fm]);
    const StmtId at = r.crashed ? r.crash_stmt : r.path.back();
    ErrorMessage e;
    e.message = failure_message(r, plan.expected[fm]);
    e.frames.push_back({cls, slots[fm].name, slots[fm].first_line - 1 + flat[at].line});
    e.frames.push_back({cls + "Test", plan.test_method, plan.test_line});
    t.error = std::move(e);
  }
  return t;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

std::vector<std::string> program_variables(const MiniProgram& p) {
  std::set<std::string> seen(p.params.begin(), p.params.end());
  for (const auto& f : mini::flatten(p)) {
    if (auto v = mini::defined_var(*f.stmt)) seen.insert(*v);
  }
  return {seen.begin(), seen.end()};
}

std::string call_text(const MethodSlot& slot, const std::vector<std::int64_t>& inputs) {
  std::vector<std::string> args;
  for (auto v : inputs) args.push_back(std::to_string(v));
  return slot.name + "(" + join(args, ", ") + ")";
}

}  // namespace

std::string project_name(std::size_t project) {
  std::string n = std::to_string(project + 1);
  if (n.size() < 2) n = "0" + n;
  return "proj" + n;
}

BugRecord generate_bug(const BenchmarkConfig& cfg, std::size_t project, std::size_t index) {
  if (cfg.min_size < kMinProgramSize || cfg.max_size > kMaxProgramSize || cfg.min_size > cfg.max_size) {
    fail(ErrorKind::config, "method size range must lie within [5, 60]");
  }
  if (cfg.tests_per_bug == 0) fail(ErrorKind::config, "tests_per_bug must be positive");
  const std::size_t global = index * std::max<std::size_t>(cfg.projects, 1) + project;
  Rng rng(derive_seed(cfg.seed, global + 1));
  const std::string pname = project_name(project);
  const std::string cls = kClasses[rng.below(kClasses.size())];
  const std::size_t nm = cfg.distractors + 1;

  // Distinct method names.
  std::vector<MethodSlot> slots(nm);
  std::set<std::string> used;
  for (auto& s : slots) {
    do {
      s.name = std::string(kVerbs[rng.below(kVerbs.size())]) + kNouns[rng.below(kNouns.size())];
    } while (!used.insert(s.name).second);
  }
  auto new_program = [&](MethodSlot& s) {
    const std::size_t size = cfg.min_size + rng.below(cfg.max_size - cfg.min_size + 1);
    s.original = generate_program(rng.next(), size);
    s.original.name = s.name;
    s.current = s.original;
  };
  for (auto& s : slots) new_program(s);
  const std::size_t faulty = rng.below(nm);

  // Test plans: which methods each test calls, in what order, with what inputs.
  std::vector<TestPlan> plans(cfg.tests_per_bug);
  for (std::size_t j = 0; j < plans.size(); ++j) {
    TestPlan& tp = plans[j];
    for (std::size_t m = 0; m < nm; ++m) {
      if (rng.chance(m == faulty ? cfg.p_faulty_invoked : cfg.p_other_invoked)) tp.order.push_back(m);
    }
    if (tp.order.empty()) tp.order.push_back(faulty);
    rng.shuffle(tp.order);
    tp.inputs.assign(nm, {});
    tp.expected.assign(nm, 0);
    for (std::size_t m : tp.order) {
      // Arity is fixed later per program; draw the maximum and trim.
      for (std::size_t a = 0; a < kParams.size(); ++a) tp.inputs[m].push_back(rng.range(-cfg.input_range, cfg.input_range));
    }
    tp.test_method = "test_" + slots[tp.order.front()].name + "_" + std::to_string(j + 1);
    tp.test_id = cls + "Test." + tp.test_method;
    tp.test_line = 20 + 6 * static_cast<int>(j);
  }
  auto fix_inputs = [&](std::size_t m) {
    for (auto& tp : plans) {
      if (!tp.inputs[m].empty()) {
        tp.inputs[m].resize(kParams.size());
        tp.inputs[m].resize(slots[m].original.params.size());
        const auto r = mini::run(slots[m].original, tp.inputs[m]);
        if (r.crashed) fail(ErrorKind::data, "reference program crashed");
        tp.expected[m] = *r.value;
      }
    }
  };
  for (std::size_t m = 0; m < nm; ++m) fix_inputs(m);

  // Fault injection with resampling until some test fails.
  std::vector<const MiniProgram*> progs(nm);
  std::vector<TestRun> base(plans.size());
  mini::FaultSpec spec;
  bool found = false;
  for (std::size_t attempt = 0; attempt < cfg.resample_budget && !found; ++attempt) {
    if (attempt > 0 && attempt % 25 == 0) {
      new_program(slots[faulty]);
      fix_inputs(faulty);
    }
    spec = random_fault(slots[faulty].original, rng);
    slots[faulty].current = mini::inject_fault(slots[faulty].original, spec);
    for (std::size_t m = 0; m < nm; ++m) progs[m] = &slots[m].current;
    bool any_fail = false;
    for (std::size_t j = 0; j < plans.size(); ++j) {
      base[j] = run_test(plans[j], progs);
      any_fail |= base[j].failed;
    }
    found = any_fail;
  }
  if (!found) {
    fail(ErrorKind::data, "bug " + pname + "-" + std::to_string(index + 1) + ": resampling budget exhausted");
  }

  // Source layout: methods one after another in a single class file.
  int line = 5;
  for (auto& s : slots) {
    s.first_line = line;
    const std::string text = mini::print_program(s.current);
    line += static_cast<int>(std::count(text.begin(), text.end(), '\n')) + 1;
  }

  BugRecord bug;
  bug.bug_id = pname + "-" + std::to_string(index + 1);
  for (std::size_t m = 0; m < nm; ++m) {
    MethodRecord rec;
    const MethodSlot& s = slots[m];
    rec.method_id = cls + "." + s.name;
    rec.is_faulty = m == faulty;
    rec.statements = statement_records(s.current, s.first_line,
                                       m == faulty ? std::optional<StmtId>(spec.target_stmt) : std::nullopt);
    rec.ast = mini::to_ast(s.current);
    rec.dfg_edges = mini::build_dfg(s.current);
    for (std::size_t j = 0; j < plans.size(); ++j) rec.tests.push_back(to_record(plans[j], base[j], m, slots, progs, cls));

    const std::size_t ns = rec.statements.size();
    for (StmtId st = 0; st < ns; ++st) {
      for (mini::Mutator mu : cfg.mutators) {
        auto mp = mini::mutate(s.current, st, mu);
        if (!mp) continue;
        std::vector<const MiniProgram*> mprogs = progs;
        mprogs[m] = &*mp;
        MutantRecord mr;
        mr.mutant_id = s.name + "-" + std::string(mini::to_string(mu)) + "-" + std::to_string(st);
        mr.stmt_id = st;
        mr.op = mini::to_string(mu);
        for (std::size_t j = 0; j < plans.size(); ++j) {
          const TestRun tr = run_test(plans[j], mprogs, &base[j], m);
          mr.tests.push_back(to_record(plans[j], tr, m, slots, mprogs, cls));
        }
        rec.mutants.push_back(std::move(mr));
      }
    }

    std::vector<std::string> helpers;
    const std::size_t nh = 1 + rng.below(2);
    for (std::size_t h = 0; h < nh; ++h) helpers.push_back(kHelpers[rng.below(kHelpers.size())]);
    rec.facets.qualified_name = "org.synth." + pname + "." + cls + "." + s.name;
    rec.facets.accessed_classes = cls + (rng.chance(0.5) ? " Math" : " Objects");
    rec.facets.invocations = join(helpers, " ");
    rec.facets.variables = join(program_variables(s.current), " ");
    rec.facets.comments = std::string(kWords[rng.below(kWords.size())]) + " the " + s.name + " " +
                          kWords[rng.below(kWords.size())];
    bug.methods.push_back(std::move(rec));
  }

  std::vector<std::string> names, sources, messages;
  for (std::size_t j = 0; j < plans.size(); ++j) {
    if (!base[j].failed) continue;
    const TestPlan& tp = plans[j];
    names.push_back(tp.test_id);
    std::string src = "public void " + tp.test_method + "() {";
    for (std::size_t m : tp.order) {
      src += " assertEquals(" + std::to_string(tp.expected[m]) + ", subject." + call_text(slots[m], tp.inputs[m]) + ");";
    }
    sources.push_back(src + " }");
    const auto& err = *bug.methods[0].tests[j].error;
    std::string msg = err.message;
    for (const auto& f : err.frames) {
      msg += " at " + f.class_name + "." + f.method_name + "(" + f.class_name + ".java:" + std::to_string(f.line) + ")";
    }
    messages.push_back(msg);
  }
  bug.failing_test_facets = {join(names, " "), join(sources, "\n"), join(messages, "\n")};
  bug.tie_heavy = is_tie_heavy(bug);
  return bug;
}

std::vector<ProjectDataset> generate_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.bugs == 0) fail(ErrorKind::config, "bugs must be at least 1");
  if (cfg.projects == 0) fail(ErrorKind::config, "projects must be at least 1");
  const std::size_t np = std::min(cfg.projects, cfg.bugs);
  BenchmarkConfig c = cfg;
  c.projects = np;
  std::vector<std::optional<BugRecord>> bugs(cfg.bugs);
  std::vector<std::string> errors(cfg.bugs);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
  auto work = [&](std::size_t w) {
    for (std::size_t g = w; g < cfg.bugs; g += workers) {
      try {
        bugs[g] = generate_bug(c, g % np, g / np);
      } catch (const Error& e) {
        errors[g] = e.what();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (!e.empty()) fail(ErrorKind::data, e);
  }
  std::vector<ProjectDataset> out(np);
  for (std::size_t p = 0; p < np; ++p) out[p].project = project_name(p);
  for (std::size_t g = 0; g < cfg.bugs; ++g) out[g % np].bugs.push_back(std::move(*bugs[g]));
  return out;
}

bool is_tie_heavy(const BugRecord& bug) {
  for (const auto& m : bug.methods) {
    if (!m.is_faulty) continue;
    const auto cm = build_spectrum_matrix(m);
    for (const auto& s : m.statements) {
      if (!s.is_faulty) continue;
      std::size_t same = 0;
      for (std::size_t r = 0; r < cm.rows; ++r) {
        if (r == s.stmt_id) continue;
        bool eq = true;
        for (std::size_t j = 0; j < cm.cols && eq; ++j) eq = cm.at(r, j) == cm.at(s.stmt_id, j);
        same += eq;
      }
      if (same >= 2) return true;
    }
  }
  return false;
}

}  // namespace covrank::synth
