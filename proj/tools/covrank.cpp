// covrank command-line front end.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "covrank/config.hpp"
#include "covrank/dataset.hpp"
#include "covrank/dep_embed.hpp"
#include "covrank/ee_matrix.hpp"
#include "covrank/engine.hpp"
#include "covrank/error.hpp"
#include "covrank/evaluation.hpp"
#include "covrank/features.hpp"
#include "covrank/pgm.hpp"
#include "covrank/sbfl.hpp"
#include "covrank/synthgen.hpp"

namespace fs = std::filesystem;
using namespace covrank;
using nlohmann::json;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string preset = "desk";
  std::string config;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Run seed");
  app->add_option("--out", c.out, "Output path");
  app->add_option("--preset", c.preset, "Preset: desk or thorough");
  app->add_option("--config", c.config, "RunConfig JSON file");
}

RunConfig resolve(const Common& c) {
  RunConfig rc = preset_config(c.preset);
  if (!c.config.empty()) apply_file(rc, c.config);
  if (c.seed) set_seed(rc, *c.seed);
  if (!c.out.empty()) rc.out = c.out;
  validate_config(rc);
  return rc;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::data, "cannot write " + path.string());
  out << text;
}

void write_run_config(const fs::path& dir, const RunConfig& rc) {
  write_text(dir / "run_config.json", config_to_json(rc).dump(2) + "\n");
}

std::vector<ProjectDataset> load_input(const std::string& in) {
  if (in.empty()) fail(ErrorKind::config, "no dataset given (--in)");
  if (!fs::exists(in)) fail(ErrorKind::data, "dataset not found: " + in);
  return load_datasets(in);
}

struct BugRef {
  std::size_t project;
  std::size_t bug;
};

BugRef locate(const std::vector<ProjectDataset>& ds, const std::string& bug_id) {
  const auto hit = find_bug(ds, bug_id);
  if (!hit) fail(ErrorKind::data, "bug not found: " + bug_id);
  return {hit->first, hit->second};
}

const MethodRecord& locate_method(const BugRecord& bug, const std::string& method_id) {
  if (method_id.empty()) {
    for (const auto& m : bug.methods) {
      if (m.is_faulty) return m;
    }
    return bug.methods.at(0);
  }
  for (const auto& m : bug.methods) {
    if (m.method_id == method_id) return m;
  }
  fail(ErrorKind::data, "method " + method_id + " not found in bug " + bug.bug_id);
}

std::size_t method_index(const BugRecord& bug, const MethodRecord& m) {
  return static_cast<std::size_t>(&m - bug.methods.data());
}

void save_generated(const std::vector<ProjectDataset>& ds, const fs::path& out) {
  if (out.extension() == ".json") {
    if (ds.size() != 1) fail(ErrorKind::config, "a single output file needs exactly one project");
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    save_dataset(ds[0], out);
    return;
  }
  fs::create_directories(out);
  for (const auto& d : ds) save_dataset(d, out / (d.project + ".json"));
}

std::vector<Level> levels_of(const std::string& s) {
  if (s == "stmt") return {Level::statement};
  if (s == "method") return {Level::method};
  if (s == "both") return {Level::statement, Level::method};
  fail(ErrorKind::config, "unknown level '" + s + "' (expected stmt, method or both)");
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void train_and_save(const std::vector<ProjectDataset>& ds, const RunConfig& rc, const std::vector<Level>& levels,
                    const fs::path& dir) {
  const auto features = build_features(ds, rc.engine.features, worker_threads(rc));
  std::vector<const BugFeatures*> bugs;
  for (const auto& p : features) {
    for (const auto& b : p.bugs) bugs.push_back(&b);
  }
  const json snapshot = config_to_json(rc);
  for (Level l : levels) {
    const Model m = train_model(l, bugs, rc.engine);
    save_model(m, dir, snapshot);
    std::fprintf(stderr, "trained %s model on %zu elements (%zu faulty)\n", level_name(l).c_str(), m.train_elements,
                 m.train_positives);
  }
  write_run_config(dir, rc);
}

// Features of one bug computed with the tables of its project.
BugFeatures bug_features(const ProjectDataset& project, const BugRecord& bug, const FeatureConfig& cfg) {
  const ProjectTables tables = build_project_tables(project, cfg);
  BugFeatures bf;
  bf.bug_id = bug.bug_id;
  bf.tie_heavy = bug.tie_heavy.value_or(false);
  for (const auto& m : bug.methods) bf.methods.push_back(build_method_features(bug, m, tables, cfg));
  return bf;
}

RunConfig model_config(const fs::path& dir, Level level) {
  return config_from_json(load_model_run_config(dir, level));
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covrank: fault localization over enhanced coverage matrices"};
  app.require_subcommand(1);

  // generate
  Common g_common;
  std::optional<std::size_t> g_bugs, g_tests, g_projects, g_distractors;
  auto* gen = app.add_subcommand("generate", "Generate a synthetic fl-dataset/v1 benchmark");
  add_common(gen, g_common);
  gen->add_option("--bugs", g_bugs, "Number of bugs");
  gen->add_option("--tests", g_tests, "Tests per bug");
  gen->add_option("--projects", g_projects, "Number of projects");
  gen->add_option("--distractors", g_distractors, "Non-faulty methods per bug");

  // ingest
  Common i_common;
  std::string i_in;
  auto* ingest = app.add_subcommand("ingest", "Validate a dataset and print a summary");
  add_common(ingest, i_common);
  ingest->add_option("--in", i_in, "Dataset file or directory")->required();

  // order
  Common o_common;
  std::string o_in, o_bug, o_method;
  bool o_raw = false;
  auto* order = app.add_subcommand("order", "Print the enhanced coverage matrix of a method");
  add_common(order, o_common);
  order->add_option("--in", o_in, "Dataset")->required();
  order->add_option("--bug", o_bug, "Bug id")->required();
  order->add_option("--method", o_method, "Method id (default: the faulty method)");
  order->add_flag("--raw", o_raw, "Also print the unordered matrix");

  // score-sbfl
  Common s_common;
  std::string s_in, s_bug, s_method, s_formula = "ochiai";
  int s_star = 2;
  auto* sbfl = app.add_subcommand("score-sbfl", "Ochiai or Dstar scores as CSV");
  add_common(sbfl, s_common);
  sbfl->add_option("--in", s_in, "Dataset")->required();
  sbfl->add_option("--bug", s_bug, "Bug id")->required();
  sbfl->add_option("--method", s_method, "Method id (default: every method of the bug)");
  sbfl->add_option("--formula", s_formula, "ochiai or dstar");
  sbfl->add_option("--star", s_star, "Dstar exponent");

  // embed
  Common e_common;
  std::string e_in, e_bug, e_method, e_kind = "sd";
  bool e_dump = false;
  auto* embed = app.add_subcommand("embed", "Train and print embedding tables as CSV");
  add_common(embed, e_common);
  embed->add_option("--in", e_in, "Dataset")->required();
  embed->add_option("--bug", e_bug, "Bug id")->required();
  embed->add_option("--method", e_method, "Method id (default: the faulty method)");
  embed->add_option("--kind", e_kind, "seq, graph, sd, tokens or nodes");
  embed->add_flag("--dump", e_dump, "Write the table to --out (or stdout)");

  // train
  Common t_common;
  std::string t_in, t_level = "both";
  auto* trn = app.add_subcommand("train", "Train localization models on a dataset");
  add_common(trn, t_common);
  trn->add_option("--in", t_in, "Dataset")->required();
  trn->add_option("--level", t_level, "stmt, method or both");

  // localize
  Common l_common;
  std::string l_model, l_in, l_bug, l_level = "stmt";
  auto* loc = app.add_subcommand("localize", "Rank the statements or methods of a bug");
  add_common(loc, l_common);
  loc->add_option("--model", l_model, "Model directory")->required();
  loc->add_option("--in", l_in, "Dataset (default: the one the model was trained on)");
  loc->add_option("--bug", l_bug, "Bug id")->required();
  loc->add_option("--level", l_level, "stmt or method");

  // evaluate
  Common v_common;
  std::string v_in, v_protocol, v_ablate, v_level;
  auto* eval = app.add_subcommand("evaluate", "Leave-one-out or cross-project evaluation");
  add_common(eval, v_common);
  eval->add_option("--in", v_in, "Dataset")->required();
  eval->add_option("--protocol", v_protocol, "loo or cross");
  eval->add_option("--ablate", v_ablate, "Comma-separated toggles to disable, or 'incremental'");
  eval->add_option("--level", v_level, "stmt, method or both");

  // featmap
  Common f_common;
  std::string f_model, f_in, f_bug, f_method, f_network = "ss";
  std::size_t f_stmt = 0;
  auto* fmap = app.add_subcommand("featmap", "Export convolution feature maps as PGM images");
  add_common(fmap, f_common);
  fmap->add_option("--model", f_model, "Model directory")->required();
  fmap->add_option("--in", f_in, "Dataset (default: the one the model was trained on)");
  fmap->add_option("--bug", f_bug, "Bug id")->required();
  fmap->add_option("--method", f_method, "Method id (default: the faulty method)");
  fmap->add_option("--stmt", f_stmt, "Statement id for statement-level networks");
  fmap->add_option("--network", f_network, "ss, ms, classifier, sm or method_classifier");

  // pipeline
  Common p_common;
  auto* pipe = app.add_subcommand("pipeline", "Generate, ingest, train and evaluate in one run");
  add_common(pipe, p_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ErrorKind::config);
  }

  try {
    if (gen->parsed()) {
      RunConfig rc = resolve(g_common);
      if (g_bugs) rc.generate.bugs = *g_bugs;
      if (g_tests) rc.generate.tests_per_bug = *g_tests;
      if (g_projects) rc.generate.projects = *g_projects;
      if (g_distractors) rc.generate.distractors = *g_distractors;
      validate_config(rc);
      const fs::path out = rc.out.empty() ? fs::path("dataset") : fs::path(rc.out);
      const auto ds = synth::generate_benchmark(rc.generate);
      save_generated(ds, out);
      if (out.extension() != ".json") write_run_config(out, rc);
      std::size_t bugs = 0, tie = 0;
      for (const auto& d : ds) {
        bugs += d.bugs.size();
        for (const auto& b : d.bugs) tie += b.tie_heavy.value_or(false);
      }
      std::printf("wrote %zu bugs in %zu projects to %s (%zu tie-heavy)\n", bugs, ds.size(), out.string().c_str(), tie);
    } else if (ingest->parsed()) {
      RunConfig rc = resolve(i_common);
      const auto ds = load_input(i_in);
      std::size_t bugs = 0, methods = 0, stmts = 0, tests = 0, mutants = 0, tie = 0;
      for (const auto& d : ds) {
        for (const auto& b : d.bugs) {
          ++bugs;
          tie += b.tie_heavy.value_or(synth::is_tie_heavy(b));
          for (const auto& m : b.methods) {
            ++methods;
            stmts += m.statements.size();
            tests += m.tests.size();
            mutants += m.mutants.size();
          }
        }
      }
      std::printf("projects %zu\nbugs %zu\nmethods %zu\nstatements %zu\ntest records %zu\nmutants %zu\ntie-heavy %zu\n",
                  ds.size(), bugs, methods, stmts, tests, mutants, tie);
      if (!rc.out.empty()) {
        save_generated(ds, rc.out);
        if (fs::path(rc.out).extension() != ".json") write_run_config(rc.out, rc);
      }
    } else if (order->parsed()) {
      RunConfig rc = resolve(o_common);
      const auto ds = load_input(o_in);
      const auto ref = locate(ds, o_bug);
      const auto& bug = ds[ref.project].bugs[ref.bug];
      const auto& m = locate_method(bug, o_method);
      if (o_raw) {
        FeatureConfig raw = rc.engine.features;
        raw.toggles.ordering = false;
        std::printf("# %s unordered\n%s", m.method_id.c_str(), render_matrix(enhanced_matrix(m, raw)).c_str());
      }
      const auto ecc = enhanced_matrix(m, rc.engine.features);
      std::printf("# %s columns:", m.method_id.c_str());
      for (std::size_t p : ecc.col_order) std::printf(" %s", m.tests[p].test_id.c_str());
      std::printf("\n%s", render_matrix(ecc).c_str());
    } else if (sbfl->parsed()) {
      resolve(s_common);
      Formula f;
      if (s_formula == "ochiai") f = Formula::ochiai;
      else if (s_formula == "dstar") f = Formula::dstar;
      else fail(ErrorKind::config, "unknown formula '" + s_formula + "'");
      const auto ds = load_input(s_in);
      const auto ref = locate(ds, s_bug);
      const auto& bug = ds[ref.project].bugs[ref.bug];
      std::vector<const MethodRecord*> methods;
      if (s_method.empty()) {
        for (const auto& m : bug.methods) methods.push_back(&m);
      } else {
        methods.push_back(&locate_method(bug, s_method));
      }
      std::vector<double> scores;
      std::vector<std::pair<const MethodRecord*, std::size_t>> ids;
      for (const MethodRecord* m : methods) {
        const auto s = sbfl_scores(build_spectrum_matrix(*m), outcomes_of(m->tests), f, s_star);
        for (std::size_t i = 0; i < s.size(); ++i) {
          scores.push_back(s[i]);
          ids.push_back({m, i});
        }
      }
      const auto ranked = rank_by_score(scores);
      std::printf("method_id,stmt_id,line,score,rank\n");
      for (const auto& e : ranked.entries) {
        const auto& [m, i] = ids[e.id];
        std::printf("%s,%zu,%d,%s,%s\n", csv_quote(m->method_id).c_str(), i, m->statements[i].line,
                    fmt(e.score).c_str(), fmt(e.rank).c_str());
      }
    } else if (embed->parsed()) {
      RunConfig rc = resolve(e_common);
      const auto ds = load_input(e_in);
      const auto ref = locate(ds, e_bug);
      const auto& bug = ds[ref.project].bugs[ref.bug];
      const auto& m = locate_method(bug, e_method);
      const auto& f = rc.engine.features;
      std::string csv;
      if (e_kind == "tokens" || e_kind == "nodes") {
        const auto t = build_project_tables(ds[ref.project], f);
        csv = (e_kind == "tokens" ? t.tokens : t.nodes).to_csv();
      } else if (e_kind == "seq" || e_kind == "graph") {
        const std::uint64_t base = derive_seed(f.seed, hash_string(bug.bug_id + "/" + m.method_id));
        SgnsConfig sg = f.sgns;
        sg.dim = f.dim;
        if (e_kind == "seq") {
          std::vector<std::vector<StmtId>> paths;
          for (const auto& t : m.tests) {
            if (!t.exec_path.empty()) paths.push_back(t.exec_path);
          }
          sg.seed = derive_seed(base, 1);
          csv = train_sequence_embedding(paths, sg).to_csv();
        } else {
          Node2VecConfig nv = f.node2vec;
          nv.sgns = sg;
          nv.sgns.seed = derive_seed(base, 2);
          csv = train_graph_embedding(build_weighted_dfg(m.dfg_edges, m.statements.size()), nv).to_csv();
        }
      } else if (e_kind == "sd") {
        const auto sd = method_dependency_vectors(m, bug.bug_id, f);
        EmbeddingTable t;
        t.dim = f.dim;
        for (std::size_t i = 0; i < sd.size(); ++i) t.vectors.emplace(std::to_string(i), sd[i]);
        csv = t.to_csv();
      } else {
        fail(ErrorKind::config, "unknown embedding kind '" + e_kind + "'");
      }
      if (e_dump && !rc.out.empty()) {
        write_text(rc.out, csv);
      } else {
        std::fputs(csv.c_str(), stdout);
      }
    } else if (trn->parsed()) {
      RunConfig rc = resolve(t_common);
      rc.dataset = t_in;
      const fs::path out = rc.out.empty() ? fs::path("model") : fs::path(rc.out);
      rc.model = out.string();
      const auto ds = load_input(t_in);
      train_and_save(ds, rc, levels_of(t_level), out);
    } else if (loc->parsed()) {
      const auto levels = levels_of(l_level);
      if (levels.size() != 1) fail(ErrorKind::config, "localize takes --level stmt or method");
      const Level level = levels[0];
      RunConfig rc = model_config(l_model, level);
      const auto ds = load_input(l_in.empty() ? rc.dataset : l_in);
      const auto ref = locate(ds, l_bug);
      const auto& bug = ds[ref.project].bugs[ref.bug];
      const Model model = load_model(l_model, level, rc.engine);
      const BugFeatures bf = bug_features(ds[ref.project], bug, rc.engine.features);
      const auto elems = score_bug(model, bf);
      std::vector<double> scores;
      for (const auto& e : elems) scores.push_back(e.score);
      const auto ranked = rank_by_score(scores);
      if (level == Level::statement) {
        std::printf("rank,method_id,stmt_id,line,score,text\n");
      } else {
        std::printf("rank,method_id,score\n");
      }
      for (const auto& r : ranked.entries) {
        const auto& e = elems[r.id];
        if (level == Level::statement) {
          const auto& m = locate_method(bug, e.method_id);
          const auto& s = m.statements[*e.stmt];
          std::printf("%s,%s,%zu,%d,%s,%s\n", fmt(r.rank).c_str(), csv_quote(e.method_id).c_str(), *e.stmt, s.line,
                      fmt(r.score).c_str(), csv_quote(s.text).c_str());
        } else {
          std::printf("%s,%s,%s\n", fmt(r.rank).c_str(), csv_quote(e.method_id).c_str(), fmt(r.score).c_str());
        }
      }
    } else if (eval->parsed()) {
      RunConfig rc = resolve(v_common);
      rc.dataset = v_in;
      if (!v_protocol.empty()) {
        if (v_protocol == "loo") rc.evaluation.protocol = Protocol::loo;
        else if (v_protocol == "cross") rc.evaluation.protocol = Protocol::cross;
        else fail(ErrorKind::config, "unknown protocol '" + v_protocol + "'");
      }
      if (!v_level.empty()) {
        const auto lv = levels_of(v_level);
        rc.evaluation.statement = std::find(lv.begin(), lv.end(), Level::statement) != lv.end();
        rc.evaluation.method = std::find(lv.begin(), lv.end(), Level::method) != lv.end();
      }
      const auto ds = load_input(v_in);
      std::vector<EvalReport> reports;
      if (v_ablate.empty()) {
        reports.push_back(evaluate_datasets(ds, rc));
      } else {
        const auto variants = v_ablate == "incremental" ? incremental_variants() : ablation_variants(split(v_ablate));
        reports = ablate(ds, rc, variants);
      }
      json j;
      j["config"] = config_to_json(rc);
      j["reports"] = json::array();
      for (const auto& r : reports) j["reports"].push_back(report_to_json(r));
      const std::string text = j.dump(2) + "\n";
      std::fputs(text.c_str(), stdout);
      for (const auto& r : reports) std::fputs(report_table(r).c_str(), stdout);
      if (!rc.out.empty()) {
        write_text(fs::path(rc.out) / "report.json", text);
        write_run_config(rc.out, rc);
      }
    } else if (fmap->parsed()) {
      const bool method_level = f_network == "sm" || f_network == "method_classifier";
      const Level level = method_level ? Level::method : Level::statement;
      RunConfig rc = model_config(f_model, level);
      const fs::path out = f_common.out.empty() ? fs::path("featmap") : fs::path(f_common.out);
      const auto ds = load_input(f_in.empty() ? rc.dataset : f_in);
      const auto ref = locate(ds, f_bug);
      const auto& bug = ds[ref.project].bugs[ref.bug];
      const auto& m = locate_method(bug, f_method);
      const Model model = load_model(f_model, level, rc.engine);
      const BugFeatures bf = bug_features(ds[ref.project], bug, rc.engine.features);
      const MethodFeatures& mf = bf.methods[method_index(bug, m)];
      if (!method_level && f_stmt >= mf.statements) fail(ErrorKind::data, "statement id out of range");
      const Network* net = nullptr;
      NdArray x;
      if (f_network == "ss" || f_network == "ms") {
        const std::size_t ch = f_network == "ss" ? 0 : 1;
        if (!model.encoders[ch]) fail(ErrorKind::data, "channel " + f_network + " is disabled in this model");
        if (ch == 1 && mf.x_ms.empty()) fail(ErrorKind::data, "method has no mutation input");
        net = &*model.encoders[ch];
        x = ch == 0 ? mf.x_ss[f_stmt] : mf.x_ms[f_stmt];
      } else if (f_network == "classifier") {
        net = &model.classifier;
        x = statement_tensor(model, mf, f_stmt);
      } else if (f_network == "sm") {
        net = &*model.encoders[0];
        x = mf.x_sm;
      } else if (f_network == "method_classifier") {
        net = &model.classifier;
        x = method_tensor(model, mf);
      } else {
        fail(ErrorKind::config, "unknown network '" + f_network + "'");
      }
      fs::create_directories(out);
      const auto maps = net->feature_maps(x);
      for (std::size_t k = 0; k < maps.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "map_%02zu.pgm", k);
        write_pgm(out / name, normalize_map(maps[k]));
      }
      write_pgm(out / "matrix.pgm", matrix_image(mf.ecc));
      write_run_config(out, rc);
      std::printf("wrote %zu feature maps and matrix.pgm to %s\n", maps.size(), out.string().c_str());
    } else if (pipe->parsed()) {
      RunConfig rc = resolve(p_common);
      const fs::path out = rc.out.empty() ? fs::path("pipeline_out") : fs::path(rc.out);
      rc.out = out.string();
      rc.dataset = (out / "dataset").string();
      rc.model = (out / "model").string();
      const auto t0 = std::chrono::steady_clock::now();
      save_generated(synth::generate_benchmark(rc.generate), rc.dataset);
      const auto ds = load_input(rc.dataset);
      std::vector<Level> levels;
      if (rc.evaluation.statement) levels.push_back(Level::statement);
      if (rc.evaluation.method) levels.push_back(Level::method);
      train_and_save(ds, rc, levels, rc.model);
      const EvalReport rep = evaluate_datasets(ds, rc);
      json j;
      j["config"] = config_to_json(rc);
      j["reports"] = json::array({report_to_json(rep)});
      write_text(out / "report.json", j.dump(2) + "\n");
      write_text(out / "report.txt", report_table(rep));
      write_run_config(out, rc);
      write_run_config(rc.dataset, rc);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::fputs(report_table(rep).c_str(), stdout);
      std::fprintf(stderr, "pipeline finished in %.1f s; artifacts in %s\n", secs, out.string().c_str());
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "covrank: error: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "covrank: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
