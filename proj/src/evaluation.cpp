#include "covrank/evaluation.hpp"

#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

#include "covrank/error.hpp"
#include "covrank/rng.hpp"

namespace covrank {

using nlohmann::json;

std::vector<Fold> leave_one_out_folds(const std::vector<ProjectFeatures>& projects) {
  std::vector<Fold> folds;
  for (std::size_t p = 0; p < projects.size(); ++p) {
    const std::size_t n = projects[p].bugs.size();
    if (n < 2) {
      fail(ErrorKind::evaluation, "leave-one-out: project " + projects[p].project + " has " + std::to_string(n) +
                                      " bug(s); at least two are required");
    }
    for (std::size_t b = 0; b < n; ++b) {
      Fold f;
      f.test.push_back({p, b});
      for (std::size_t o = 0; o < n; ++o) {
        if (o != b) f.train.push_back({p, o});
      }
      folds.push_back(std::move(f));
    }
  }
  return folds;
}

std::vector<Fold> cross_project_folds(const std::vector<ProjectFeatures>& projects) {
  if (projects.size() < 2) fail(ErrorKind::evaluation, "cross-project: at least two projects are required");
  std::vector<Fold> folds;
  for (std::size_t p = 0; p < projects.size(); ++p) {
    Fold f;
    for (std::size_t q = 0; q < projects.size(); ++q) {
      for (std::size_t b = 0; b < projects[q].bugs.size(); ++b) (q == p ? f.test : f.train).push_back({q, b});
    }
    folds.push_back(std::move(f));
  }
  return folds;
}

namespace {

struct BugResult {
  std::string project;
  const BugFeatures* bug = nullptr;
  std::vector<ScoredElement> stmt;
  std::vector<ScoredElement> method;
};

RankedBug ranked(const BugResult& r, const std::vector<ScoredElement>& elems) {
  std::vector<double> scores;
  std::vector<bool> faulty;
  for (const auto& e : elems) {
    scores.push_back(e.score);
    faulty.push_back(e.faulty);
  }
  return make_ranked_bug(r.bug->bug_id, r.project, scores, faulty, r.bug->tie_heavy);
}

template <class F>
std::vector<RankedBug> rank_all(const std::vector<BugResult>& results, F elems_of) {
  std::vector<RankedBug> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(ranked(r, elems_of(r)));
  return out;
}

std::vector<RankedBug> tie_subset(const std::vector<RankedBug>& bugs) {
  std::vector<RankedBug> out;
  for (const auto& b : bugs) {
    if (b.tie_heavy) out.push_back(b);
  }
  return out;
}

LevelReport level_report(const std::vector<BugResult>& results, Level level) {
  const bool st = level == Level::statement;
  LevelReport rep;
  rep.bugs = rank_all(results, [&](const BugResult& r) { return st ? r.stmt : r.method; });
  const auto och = rank_all(results, [&](const BugResult& r) {
    return st ? baseline_statements(*r.bug, Baseline::ochiai) : baseline_methods(*r.bug, Baseline::ochiai);
  });
  const auto dst = rank_all(results, [&](const BugResult& r) {
    return st ? baseline_statements(*r.bug, Baseline::dstar) : baseline_methods(*r.bug, Baseline::dstar);
  });
  rep.overall = summarize(rep.bugs);
  std::map<std::string, std::vector<RankedBug>> by_project;
  for (const auto& b : rep.bugs) by_project[b.project].push_back(b);
  for (const auto& [p, bugs] : by_project) rep.projects[p] = summarize(bugs);
  rep.ochiai = summarize(och);
  rep.dstar = summarize(dst);
  const auto tm = tie_subset(rep.bugs);
  rep.tie_heavy_bugs = tm.size();
  rep.tie_heavy = summarize(tm);
  rep.tie_heavy_ochiai = summarize(tie_subset(och));
  rep.tie_heavy_dstar = summarize(tie_subset(dst));
  rep.random_top1 = random_topk_expectation(rep.bugs, 1);
  rep.random_top3 = random_topk_expectation(rep.bugs, 3);
  rep.random_top5 = random_topk_expectation(rep.bugs, 5);
  return rep;
}

std::vector<BugResult> run_fold(const std::vector<ProjectFeatures>& projects, const Fold& fold,
                                const EngineConfig& engine, const EvalSettings& settings) {
  std::vector<const BugFeatures*> train;
  for (const auto& [p, b] : fold.train) train.push_back(&projects[p].bugs[b]);
  std::optional<Model> sm, mm;
  if (settings.statement) sm = train_model(Level::statement, train, engine);
  if (settings.method) mm = train_model(Level::method, train, engine);
  std::vector<BugResult> out;
  for (const auto& [p, b] : fold.test) {
    BugResult r;
    r.project = projects[p].project;
    r.bug = &projects[p].bugs[b];
    if (sm) r.stmt = score_bug(*sm, *r.bug);
    if (mm) r.method = score_bug(*mm, *r.bug);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

EvalReport evaluate_folds(const std::vector<ProjectFeatures>& projects, const std::vector<Fold>& folds,
                          const EngineConfig& engine, const EvalSettings& settings) {
  std::vector<std::vector<BugResult>> per_fold(folds.size());
  std::vector<std::optional<Error>> errors(folds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t f = next++; f < folds.size(); f = next++) {
      EngineConfig cfg = engine;
      cfg.seed = derive_seed(engine.seed, f);
      try {
        per_fold[f] = run_fold(projects, folds[f], cfg, settings);
      } catch (const Error& e) {
        errors[f] = e;
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(settings.threads, folds.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) throw *e;
  }
  std::vector<BugResult> results;
  for (auto& f : per_fold) {
    for (auto& r : f) results.push_back(std::move(r));
  }
  EvalReport rep;
  rep.protocol = settings.protocol;
  rep.folds = folds.size();
  if (settings.statement) rep.statement = level_report(results, Level::statement);
  if (settings.method) rep.method = level_report(results, Level::method);
  return rep;
}

EvalReport run_leave_one_out(const std::vector<ProjectFeatures>& projects, const EngineConfig& engine,
                             const EvalSettings& settings) {
  EvalSettings s = settings;
  s.protocol = Protocol::loo;
  return evaluate_folds(projects, leave_one_out_folds(projects), engine, s);
}

EvalReport run_cross_project(const std::vector<ProjectFeatures>& projects, const EngineConfig& engine,
                             const EvalSettings& settings) {
  EvalSettings s = settings;
  s.protocol = Protocol::cross;
  return evaluate_folds(projects, cross_project_folds(projects), engine, s);
}

EvalReport evaluate_datasets(const std::vector<ProjectDataset>& datasets, const RunConfig& config) {
  EvalSettings s = config.evaluation;
  s.threads = worker_threads(config);
  const auto features = build_features(datasets, config.engine.features, s.threads);
  return s.protocol == Protocol::loo ? run_leave_one_out(features, config.engine, s)
                                     : run_cross_project(features, config.engine, s);
}

std::vector<Variant> incremental_variants() {
  Toggles base;
  base.ordering = false;
  base.stat_dep = false;
  Toggles order = base;
  order.ordering = true;
  return {{"base", base}, {"base+order", order}, {"base+order+statedep", Toggles{}}};
}

std::vector<Variant> ablation_variants(const std::vector<std::string>& flags) {
  std::vector<Variant> out{{"full", Toggles{}}};
  for (const auto& f : flags) {
    Toggles t;
    if (f == "ordering") t.ordering = false;
    else if (f == "ee_marks") t.ee_marks = false;
    else if (f == "stat_dep") t.stat_dep = false;
    else if (f == "mutation") t.mutation = false;
    else if (f == "code_rep") t.code_rep = false;
    else if (f == "text_sim") t.text_sim = false;
    else fail(ErrorKind::config, "unknown ablation flag '" + f + "'");
    out.push_back({"no_" + f, t});
  }
  return out;
}

std::vector<EvalReport> ablate(const std::vector<ProjectDataset>& datasets, const RunConfig& config,
                               const std::vector<Variant>& variants) {
  std::vector<EvalReport> out;
  for (const auto& v : variants) {
    RunConfig c = config;
    c.engine.features.toggles = v.toggles;
    EvalReport r = evaluate_datasets(datasets, c);
    r.variant = v.name;
    out.push_back(std::move(r));
  }
  return out;
}

json metrics_to_json(const Metrics& m) {
  return {{"bugs", m.bugs}, {"top1", m.top1}, {"top3", m.top3},  {"top5", m.top5},
          {"p_percent", m.percent}, {"mfr", m.mfr}, {"mar", m.mar}};
}

namespace {

json level_json(const LevelReport& l) {
  json projects = json::object();
  for (const auto& [p, m] : l.projects) projects[p] = metrics_to_json(m);
  return {{"overall", metrics_to_json(l.overall)},
          {"projects", projects},
          {"baselines", {{"ochiai", metrics_to_json(l.ochiai)}, {"dstar", metrics_to_json(l.dstar)}}},
          {"tie_heavy",
           {{"bugs", l.tie_heavy_bugs},
            {"model", metrics_to_json(l.tie_heavy)},
            {"ochiai", metrics_to_json(l.tie_heavy_ochiai)},
            {"dstar", metrics_to_json(l.tie_heavy_dstar)}}},
          {"random", {{"top1", l.random_top1}, {"top3", l.random_top3}, {"top5", l.random_top5}}}};
}

std::string row(const std::string& level, const std::string& name, const Metrics& m) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-7s %-22s %6zu %6zu %6zu %7.1f %8.2f %8.2f\n", level.c_str(), name.c_str(), m.top1,
                m.top3, m.top5, m.percent, m.mfr, m.mar);
  return buf;
}

void level_table(std::ostringstream& os, const std::string& level, const LevelReport& l) {
  os << row(level, "model", l.overall);
  os << row(level, "ochiai", l.ochiai);
  os << row(level, "dstar", l.dstar);
  for (const auto& [p, m] : l.projects) os << row(level, "  " + p, m);
  os << row(level, "tie-heavy model", l.tie_heavy);
  os << row(level, "tie-heavy ochiai", l.tie_heavy_ochiai);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-7s %-22s %6.1f %6.1f %6.1f\n", level.c_str(), "random (expected)", l.random_top1,
                l.random_top3, l.random_top5);
  os << buf;
}

}  // namespace

json report_to_json(const EvalReport& r) {
  json j;
  j["protocol"] = protocol_name(r.protocol);
  j["variant"] = r.variant;
  j["folds"] = r.folds;
  if (r.statement) j["statement"] = level_json(*r.statement);
  if (r.method) j["method"] = level_json(*r.method);
  return j;
}

std::string report_table(const EvalReport& r) {
  std::ostringstream os;
  os << "protocol " << protocol_name(r.protocol) << ", variant " << r.variant << ", " << r.folds << " folds\n";
  os << "level   approach                Top-1  Top-3  Top-5      P%      MFR      MAR\n";
  if (r.statement) level_table(os, "stmt", *r.statement);
  if (r.method) level_table(os, "method", *r.method);
  return os.str();
}

}  // namespace covrank
