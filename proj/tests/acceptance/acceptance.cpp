// Acceptance run: one PASS/FAIL line per criterion, detail lines indented.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "covrank/code_repr.hpp"
#include "covrank/config.hpp"
#include "covrank/ee_matrix.hpp"
#include "covrank/evaluation.hpp"
#include "covrank/features.hpp"
#include "covrank/metrics.hpp"
#include "covrank/sbfl.hpp"
#include "covrank/synthgen.hpp"
#include "support/fixtures.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace covrank;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void detail(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void detail(const char* fmt, ...) {
  std::va_list ap;
  va_start(ap, fmt);
  std::fputs("    ", stdout);
  std::vprintf(fmt, ap);
  std::fputs("\n", stdout);
  std::fflush(stdout);
  va_end(ap);
}

struct Verdict {
  bool pass = false;
  std::string summary;
};

// 1
Verdict ordering_oracle() {
  const auto t0 = Clock::now();
  Rng rng(20240101);
  std::size_t mismatches = 0, non_perm = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto m = 1 + rng.below(20), n = 1 + rng.below(20);
    const auto mx = oracle::random_ee_matrix(rng, m, n, rng.uniform(0.0, 0.9));
    const auto got = order_tests(mx).col_order;
    mismatches += got != oracle::order_columns(mx);
    auto sorted = got;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j = 0; j < sorted.size(); ++j) non_perm += sorted[j] != j;
    non_perm += sorted.size() != n;
  }
  const double secs = since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "1000 matrices, %zu mismatches, %zu non-permutations, %.2f s (limit 30 s)",
                mismatches, non_perm, secs);
  return {mismatches == 0 && non_perm == 0 && secs < 30.0, buf};
}

// 2
Verdict coverage_figure() {
  const auto m = fixtures::join_method();
  const auto ecc = order_tests(mark_ee(build_spectrum_matrix(m), resolve_all(m, m.tests), outcomes_of(m.tests)));
  const auto& o = ecc.col_order;
  std::string order;
  for (auto j : o) order += (order.empty() ? "" : " ") + m.tests[j].test_id.substr(m.tests[j].test_id.find('.') + 1);
  const bool ok = o.size() >= 2 && o[0] == fixtures::kJoinT9 && o[1] == fixtures::kJoinT33;
  return {ok, "column order: " + order};
}

// 3
Verdict tie_pathology() {
  Rng rng(3);
  std::size_t unequal = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto m = 2 + rng.below(19), n = 1 + rng.below(20);
    auto mx = oracle::random_ee_matrix(rng, m, n);
    const auto src = rng.below(m);
    const auto dst = (src + 1 + rng.below(m - 1)) % m;
    for (std::size_t j = 0; j < n; ++j) mx.at(dst, j) = mx.at(src, j) ? 1 : 0;
    for (std::size_t j = 0; j < n; ++j) mx.at(src, j) = mx.at(src, j) ? 1 : 0;
    std::vector<Outcome> out(n);
    for (auto& x : out) x = rng.chance(0.4) ? Outcome::fail : Outcome::pass;
    const auto och = sbfl_scores(mx, out, Formula::ochiai);
    const auto dst_s = sbfl_scores(mx, out, Formula::dstar);
    unequal += och[src] != och[dst] || dst_s[src] != dst_s[dst];
    for (std::size_t i = 0; i < m; ++i) {
      double ef = 0, ep = 0, nf = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const bool cov = mx.at(i, j) != 0, f = out[j] == Outcome::fail;
        ef += cov && f;
        ep += cov && !f;
        nf += !cov && f;
      }
      worst = std::max(worst, std::abs(och[i] - oracle::closed_form_ochiai(ef, ep, nf)));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "1000 instances, %zu unequal duplicate pairs, worst |ochiai - closed form| = %.3g",
                unequal, worst);
  return {unequal == 0 && worst <= 1e-12, buf};
}

// 4
Verdict gradients() {
  const auto t0 = Clock::now();
  std::size_t coords = 0;
  double worst = 0.0;
  for (const auto& r : gradcheck::all(2024)) {
    detail("%-28s %4zu coords, worst rel err %.3g", r.name.c_str(), r.coords, r.worst);
    coords += r.coords;
    worst = std::max(worst, r.worst);
  }
  const double secs = since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu coordinates, worst relative error %.3g (limit 1e-4), %.2f s (limit 60 s)", coords,
                worst, secs);
  return {coords >= 100 && worst < 1e-4 && secs < 60.0, buf};
}

// 5
Verdict fusion_oracle() {
  Rng rng(5);
  double worst = 0.0;
  std::size_t bad_shape = 0, cases = 0;
  for (std::size_t k = 2; k <= 4; ++k) {
    for (int rep = 0; rep < 50; ++rep, ++cases) {
      std::vector<std::vector<double>> vs(k);
      Shape want;
      for (auto& v : vs) {
        v.resize(1 + rng.below(k == 4 ? 6 : 10));
        for (auto& x : v) x = rng.uniform(-3.0, 3.0);
        want.push_back(v.size());
      }
      const auto t = broadcast_hadamard(vs);
      bad_shape += t.shape() != want;
      std::vector<std::size_t> idx(k, 0);
      for (std::size_t flat = 0; flat < t.size(); ++flat) {
        double p = 1.0;
        for (std::size_t a = 0; a < k; ++a) p *= vs[a][idx[a]];
        worst = std::max(worst, std::abs(t.values()[flat] - p));
        for (std::size_t a = k; a-- > 0;) {
          if (++idx[a] < want[a]) break;
          idx[a] = 0;
        }
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu inputs (2-, 3-, 4-way), %zu shape mismatches, worst abs error %.3g", cases,
                bad_shape, worst);
  return {bad_shape == 0 && worst <= 1e-12, buf};
}

// 6
Verdict ee_parsing() {
  const auto m = fixtures::get_paint_method();
  const auto r = resolve_ee(m, m.tests[1], 1);
  const int line = r.stmt_id ? m.statements[*r.stmt_id].line : -1;
  const auto fb = fixtures::get_paint_fallback_method();
  const auto rf = resolve_ee(fb, fb.tests[1], 1);
  const bool ok = line == 128 && r.source == EeSource::frame_match && rf.stmt_id == StmtId{2} &&
                  rf.source == EeSource::exec_path_fallback;
  char buf[160];
  std::snprintf(buf, sizeof buf, "trace resolves to line %d via frame; fallback fixture resolves to stmt %ld via %s", line,
                rf.stmt_id ? static_cast<long>(*rf.stmt_id) : -1L,
                rf.source == EeSource::exec_path_fallback ? "exec path" : "frame");
  return {ok, buf};
}

RankedBug at_positions(std::size_t n, const std::vector<std::size_t>& positions) {
  std::vector<double> scores(n);
  std::vector<bool> faulty(n, false);
  for (std::size_t i = 0; i < n; ++i) scores[i] = static_cast<double>(n - i);
  for (auto p : positions) faulty[p - 1] = true;
  return make_ranked_bug("b", "P", scores, faulty);
}

// 7
Verdict metrics() {
  std::vector<RankedBug> ten;
  for (std::size_t p : {1, 1, 2, 3, 4, 5, 6, 1, 7, 2}) ten.push_back(at_positions(10, {p}));
  const auto s = summarize(ten);
  bool ok = s.top1 == 3 && s.top3 == 6 && s.top5 == 8 && s.mfr == 3.2 && s.mar == 3.2;
  const std::vector<RankedBug> one = {at_positions(6, {3})}, two = {at_positions(8, {2, 6})};
  ok = ok && mfr(one) == 3.0 && mar(one) == 3.0 && mfr(two) == 2.0 && mar(two) == 4.0;
  const std::vector<double> tie_scores = {0.9, 0.5, 0.5, 0.5, 0.1};
  const auto tie = make_ranked_bug("t", "P", tie_scores, {false, false, true, false, false});
  ok = ok && first_rank(tie) == 3.0 && !hit_at(tie, 1) && hit_at(tie, 2);

  Rng rng(7);
  std::size_t violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<RankedBug> bugs;
    for (std::size_t b = 0, nb = 1 + rng.below(10); b < nb; ++b) {
      const std::size_t n = 1 + rng.below(20);
      std::vector<double> sc(n);
      std::vector<bool> f(n, false);
      for (auto& x : sc) x = static_cast<double>(rng.below(6));
      f[rng.below(n)] = true;
      for (std::size_t i = 0; i < n; ++i) f[i] = f[i] || rng.chance(0.15);
      bugs.push_back(make_ranked_bug("r", "P", sc, f));
    }
    violations += mfr(bugs) > mar(bugs);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "10-bug tally top1/3/5 = %zu/%zu/%zu, MFR %.2f MAR %.2f; fixtures %s; MFR > MAR on %zu of 1000 random sets",
                s.top1, s.top3, s.top5, s.mfr, s.mar, ok ? "match" : "differ", violations);
  return {ok && violations == 0, buf};
}

RunConfig benchmark_config(std::uint64_t seed, std::size_t threads) {
  RunConfig rc = preset_config("desk");
  set_seed(rc, seed);
  rc.generate.bugs = 200;
  rc.generate.distractors = 5;
  rc.evaluation.protocol = Protocol::loo;
  rc.evaluation.statement = true;
  rc.evaluation.method = false;
  rc.evaluation.threads = threads;
  return rc;
}

struct SeedRun {
  std::uint64_t seed = 0;
  LevelReport full;
  std::size_t base_top1 = 0;
  std::size_t order_top1 = 0;
  double full_seconds = 0.0;
};

std::vector<SeedRun> run_benchmark(std::size_t threads) {
  std::vector<SeedRun> runs;
  const auto inc = incremental_variants();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SeedRun s;
    s.seed = seed;
    const RunConfig rc = benchmark_config(seed, threads);
    const auto data = synth::generate_benchmark(rc.generate);
    auto t0 = Clock::now();
    s.full = *evaluate_datasets(data, rc).statement;
    s.full_seconds = since(t0);
    const auto reps = ablate(data, rc, {inc[0], inc[1]});
    s.base_top1 = reps[0].statement->overall.top1;
    s.order_top1 = reps[1].statement->overall.top1;
    const auto& f = s.full;
    detail("seed %llu: top1 %zu (random %.2f, ochiai %zu, dstar %zu), tie-heavy %zu bugs: model %zu ochiai %zu; "
           "base %zu, base+order %zu, full %zu; full run %.1f s",
           static_cast<unsigned long long>(seed), f.overall.top1, f.random_top1, f.ochiai.top1, f.dstar.top1,
           f.tie_heavy_bugs, f.tie_heavy.top1, f.tie_heavy_ochiai.top1, s.base_top1, s.order_top1, f.overall.top1,
           s.full_seconds);
    runs.push_back(std::move(s));
  }
  return runs;
}

// 8
Verdict end_to_end(const std::vector<SeedRun>& runs, std::size_t threads) {
  std::size_t beat_random = 0, tie_ok = 0;
  double secs = 0.0;
  for (const auto& r : runs) {
    beat_random += static_cast<double>(r.full.overall.top1) > r.full.random_top1;
    tie_ok += r.full.tie_heavy.top1 >= r.full.tie_heavy_ochiai.top1;
    secs += r.full_seconds;
  }
  // folds are independent, so wall time scales with the worker count
  const double projected = secs * static_cast<double>(threads) / 4.0;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "top1 > random in %zu/5 seeds, tie-heavy top1 >= ochiai in %zu/5 seeds (need 4/5 each); "
                "%.0f s on %zu worker(s), %.0f s projected on 4 cores (limit 600 s)",
                beat_random, tie_ok, secs, threads, projected);
  return {beat_random >= 4 && tie_ok >= 4 && projected < 600.0, buf};
}

// 9
Verdict ablation(const std::vector<SeedRun>& runs) {
  std::size_t order_ok = 0, dep_ok = 0;
  for (const auto& r : runs) {
    order_ok += r.order_top1 >= r.base_top1;
    dep_ok += r.full.overall.top1 >= r.order_top1;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "base+order >= base in %zu/5 seeds, +statedep >= base+order in %zu/5 seeds (need 4/5)",
                order_ok, dep_ok);
  return {order_ok >= 4 && dep_ok >= 4, buf};
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 10
Verdict determinism(const fs::path& work) {
  const fs::path out = work / "pipeline";
  const fs::path first = work / "pipeline_first";
  fs::remove_all(out);
  fs::remove_all(first);
  const std::string cmd = std::string(COVRANK_CLI) + " pipeline --preset desk --seed 7 --out " + out.string() +
                          " > " + (work / "pipeline.log").string() + " 2>&1";
  const auto t0 = Clock::now();
  if (const int rc = shell(cmd); rc != 0) return {false, "first pipeline run exited with " + std::to_string(rc)};
  fs::rename(out, first);
  if (const int rc = shell(cmd); rc != 0) return {false, "second pipeline run exited with " + std::to_string(rc)};
  const double secs = since(t0);
  std::size_t files = 0, differ = 0;
  std::vector<fs::path> compared = {"report.json"};
  for (const auto& e : fs::directory_iterator(first / "model")) compared.push_back(fs::path("model") / e.path().filename());
  for (const auto& rel : compared) {
    ++files;
    if (!fs::exists(out / rel) || slurp(first / rel) != slurp(out / rel)) {
      ++differ;
      detail("differs: %s", rel.string().c_str());
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "compared report.json and %zu checkpoint files: %zu differ (two runs, %.0f s)",
                files - 1, differ, secs);
  return {differ == 0 && files > 1, buf};
}

// 11
Verdict tfidf() {
  synth::BenchmarkConfig bc;
  bc.seed = 11;
  bc.bugs = 20;
  bc.projects = 2;
  const auto projects = synth::generate_benchmark(bc);
  double worst_identical = 0.0, worst_disjoint = 0.0;
  std::size_t vectors = 0, bad_len = 0, out_of_range = 0;
  for (const auto& p : projects) {
    const TfidfCorpus corpus(project_documents(p));
    for (const auto& doc : project_documents(p)) {
      if (text_tokens(doc).empty()) continue;
      worst_identical = std::max(worst_identical, std::abs(corpus.similarity(doc, doc) - 1.0));
    }
    for (const auto& b : p.bugs) {
      for (const auto& m : b.methods) {
        const auto v = tfidf_similarity(b.failing_test_facets, m.facets, corpus);
        ++vectors;
        bad_len += v.size() != 15;
        for (double x : v) out_of_range += x < 0.0 || x > 1.0;
      }
    }
    worst_disjoint = std::max(worst_disjoint, corpus.similarity("alpha beta gamma", "delta epsilon"));
    worst_disjoint = std::max(worst_disjoint, corpus.similarity("value lowerbound", "junit assertequals"));
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "identical docs |s-1| <= %.3g, disjoint docs s <= %.3g, %zu vectors with %zu wrong lengths and %zu "
                "values outside [0,1]",
                worst_identical, worst_disjoint, vectors, bad_len, out_of_range);
  return {worst_identical <= 1e-12 && worst_disjoint == 0.0 && bad_len == 0 && out_of_range == 0, buf};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covrank acceptance run"};
  std::string work = "acceptance_work";
  std::vector<int> only;
  std::size_t threads = 0;
  app.add_option("--work", work, "Scratch directory");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--threads", threads, "Evaluation workers (0: all cores)");
  CLI11_PARSE(app, argc, argv);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  fs::create_directories(work);

  const std::set<int> selected(only.begin(), only.end());
  auto wanted = [&](int c) { return selected.empty() || selected.count(c); };
  int failures = 0;
  auto report = [&](int c, const char* name, const Verdict& v) {
    std::printf("%s  %2d %-22s %s\n", v.pass ? "PASS" : "FAIL", c, name, v.summary.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  };
  auto guarded = [&](int c, const char* name, const std::function<Verdict()>& f) {
    if (!wanted(c)) return;
    try {
      report(c, name, f());
    } catch (const std::exception& e) {
      report(c, name, {false, std::string("threw: ") + e.what()});
    }
  };

  guarded(1, "ordering-oracle", ordering_oracle);
  guarded(2, "coverage-figure", coverage_figure);
  guarded(3, "tie-pathology", tie_pathology);
  guarded(4, "gradient-check", gradients);
  guarded(5, "fusion-oracle", fusion_oracle);
  guarded(6, "ee-parsing", ee_parsing);
  guarded(7, "metrics", metrics);
  if (wanted(8) || wanted(9)) {
    std::vector<SeedRun> runs;
    try {
      runs = run_benchmark(threads);
    } catch (const std::exception& e) {
      guarded(8, "end-to-end", [&]() -> Verdict { return {false, std::string("threw: ") + e.what()}; });
      guarded(9, "ablation-direction", [&]() -> Verdict { return {false, std::string("threw: ") + e.what()}; });
    }
    if (!runs.empty()) {
      guarded(8, "end-to-end", [&] { return end_to_end(runs, threads); });
      guarded(9, "ablation-direction", [&] { return ablation(runs); });
    }
  }
  guarded(10, "determinism", [&] { return determinism(work); });
  guarded(11, "tfidf", tfidf);
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
