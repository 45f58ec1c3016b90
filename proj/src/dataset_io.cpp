#include <algorithm>
#include <fstream>
#include <sstream>

#include "covrank/dataset.hpp"
#include "covrank/error.hpp"
#include "json.hpp"

namespace covrank {

using nlohmann::json;

namespace {

json ast_to_json(const AstNode& n) {
  json j = {{"kind", n.kind}, {"children", json::array()}};
  if (n.token) j["token"] = *n.token;
  for (const auto& c : n.children) j["children"].push_back(ast_to_json(c));
  return j;
}

AstNode ast_from_json(const json& j) {
  AstNode n;
  n.kind = j.at("kind").get<std::string>();
  if (j.contains("token")) n.token = j.at("token").get<std::string>();
  if (j.contains("children")) {
    for (const auto& c : j.at("children")) n.children.push_back(ast_from_json(c));
  }
  return n;
}

json test_to_json(const TestRecord& t) {
  json j = {{"test_id", t.test_id},
            {"outcome", t.outcome == Outcome::pass ? "pass" : "fail"},
            {"covered", t.covered},
            {"exec_path", t.exec_path}};
  if (t.error) {
    json frames = json::array();
    for (const auto& f : t.error->frames) {
      frames.push_back({{"class", f.class_name}, {"method", f.method_name}, {"line", f.line}});
    }
    j["error"] = {{"message", t.error->message}, {"frames", frames}};
  }
  return j;
}

TestRecord test_from_json(const json& j) {
  TestRecord t;
  t.test_id = j.at("test_id").get<std::string>();
  const auto outcome = j.at("outcome").get<std::string>();
  if (outcome == "pass") {
    t.outcome = Outcome::pass;
  } else if (outcome == "fail") {
    t.outcome = Outcome::fail;
  } else {
    fail(ErrorKind::data, "test '" + t.test_id + "': outcome '" + outcome + "' is not pass|fail");
  }
  t.covered = j.at("covered").get<std::vector<StmtId>>();
  t.exec_path = j.at("exec_path").get<std::vector<StmtId>>();
  if (j.contains("error") && !j.at("error").is_null()) {
    ErrorMessage e;
    e.message = j.at("error").at("message").get<std::string>();
    for (const auto& f : j.at("error").at("frames")) {
      e.frames.push_back({f.at("class").get<std::string>(), f.at("method").get<std::string>(), f.at("line").get<int>()});
    }
    t.error = std::move(e);
  }
  return t;
}

json method_to_json(const MethodRecord& m) {
  json stmts = json::array();
  for (const auto& s : m.statements) {
    json js = {{"stmt_id", s.stmt_id}, {"line", s.line}, {"text", s.text}, {"is_faulty", s.is_faulty}};
    if (s.end_line != s.line) js["end_line"] = s.end_line;
    stmts.push_back(std::move(js));
  }
  json edges = json::array();
  for (const auto& [a, b] : m.dfg_edges) edges.push_back({a, b});
  json tests = json::array();
  for (const auto& t : m.tests) tests.push_back(test_to_json(t));
  json mutants = json::array();
  for (const auto& mu : m.mutants) {
    json mt = json::array();
    for (const auto& t : mu.tests) mt.push_back(test_to_json(t));
    mutants.push_back({{"mutant_id", mu.mutant_id}, {"stmt_id", mu.stmt_id}, {"operator", mu.op}, {"tests", mt}});
  }
  json j = {{"method_id", m.method_id},
            {"is_faulty", m.is_faulty},
            {"statements", stmts},
            {"ast", ast_to_json(m.ast)},
            {"dfg_edges", edges},
            {"facets",
             {{"qualified_name", m.facets.qualified_name},
              {"accessed_classes", m.facets.accessed_classes},
              {"invocations", m.facets.invocations},
              {"variables", m.facets.variables},
              {"comments", m.facets.comments}}},
            {"tests", tests},
            {"mutants", mutants}};
  if (m.coverage) j["coverage"] = *m.coverage;
  return j;
}

MethodRecord method_from_json(const json& j) {
  MethodRecord m;
  m.method_id = j.at("method_id").get<std::string>();
  m.is_faulty = j.at("is_faulty").get<bool>();
  for (const auto& s : j.at("statements")) {
    StatementRecord r;
    r.stmt_id = s.at("stmt_id").get<StmtId>();
    r.line = s.at("line").get<int>();
    r.end_line = s.contains("end_line") ? s.at("end_line").get<int>() : r.line;
    r.text = s.at("text").get<std::string>();
    r.is_faulty = s.value("is_faulty", false);
    m.statements.push_back(std::move(r));
  }
  m.ast = ast_from_json(j.at("ast"));
  for (const auto& e : j.at("dfg_edges")) {
    if (!e.is_array() || e.size() != 2) fail(ErrorKind::data, "method '" + m.method_id + "': malformed dfg edge");
    m.dfg_edges.emplace_back(e[0].get<StmtId>(), e[1].get<StmtId>());
  }
  const auto& f = j.at("facets");
  m.facets = {f.at("qualified_name").get<std::string>(), f.at("accessed_classes").get<std::string>(),
              f.at("invocations").get<std::string>(), f.at("variables").get<std::string>(),
              f.at("comments").get<std::string>()};
  for (const auto& t : j.at("tests")) m.tests.push_back(test_from_json(t));
  if (j.contains("mutants")) {
    for (const auto& mj : j.at("mutants")) {
      MutantRecord mu;
      mu.mutant_id = mj.at("mutant_id").get<std::string>();
      mu.stmt_id = mj.at("stmt_id").get<StmtId>();
      mu.op = mj.at("operator").get<std::string>();
      for (const auto& t : mj.at("tests")) mu.tests.push_back(test_from_json(t));
      m.mutants.push_back(std::move(mu));
    }
  }
  if (j.contains("coverage")) m.coverage = j.at("coverage").get<std::vector<std::vector<int>>>();
  return m;
}

json dataset_to_json(const ProjectDataset& d) {
  json bugs = json::array();
  for (const auto& b : d.bugs) {
    json methods = json::array();
    for (const auto& m : b.methods) methods.push_back(method_to_json(m));
    json jb = {{"bug_id", b.bug_id},
               {"failing_test_facets",
                {{"names", b.failing_test_facets.names},
                 {"source", b.failing_test_facets.source},
                 {"messages", b.failing_test_facets.messages}}},
               {"methods", methods}};
    if (b.tie_heavy) jb["tie_heavy"] = *b.tie_heavy;
    bugs.push_back(std::move(jb));
  }
  return {{"schema", kDatasetSchema}, {"project", d.project}, {"bugs", bugs}};
}

}  // namespace

ProjectDataset parse_dataset(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::data, origin + ": malformed JSON: " + e.what());
  }
  ProjectDataset d;
  try {
    const auto schema = j.at("schema").get<std::string>();
    if (schema != kDatasetSchema) {
      fail(ErrorKind::data, origin + ": schema '" + schema + "' is not " + kDatasetSchema);
    }
    d.project = j.at("project").get<std::string>();
    for (const auto& jb : j.at("bugs")) {
      BugRecord b;
      b.bug_id = jb.at("bug_id").get<std::string>();
      const auto& ff = jb.at("failing_test_facets");
      b.failing_test_facets = {ff.at("names").get<std::string>(), ff.at("source").get<std::string>(),
                               ff.at("messages").get<std::string>()};
      for (const auto& m : jb.at("methods")) b.methods.push_back(method_from_json(m));
      if (jb.contains("tie_heavy")) b.tie_heavy = jb.at("tie_heavy").get<bool>();
      d.bugs.push_back(std::move(b));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::data, origin + ": " + e.what());
  }
  validate_dataset(d);
  return d;
}

ProjectDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::data, "cannot open dataset " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str(), path.string());
}

std::string dataset_to_string(const ProjectDataset& dataset) { return dataset_to_json(dataset).dump(1) + "\n"; }

void save_dataset(const ProjectDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::data, "cannot write dataset " + path.string());
  out << dataset_to_string(dataset);
  if (!out) fail(ErrorKind::data, "write failed for " + path.string());
}

std::vector<ProjectDataset> load_datasets(const std::filesystem::path& path) {
  std::vector<ProjectDataset> out;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      // Skip non-dataset JSON (reports, configs) sharing the directory.
      std::ifstream in(f);
      std::stringstream ss;
      ss << in.rdbuf();
      const std::string text = ss.str();
      if (text.find(kDatasetSchema) == std::string::npos) continue;
      out.push_back(parse_dataset(text, f.string()));
    }
    if (out.empty()) fail(ErrorKind::data, "no " + std::string(kDatasetSchema) + " files in " + path.string());
  } else {
    out.push_back(load_dataset(path));
  }
  return out;
}

}  // namespace covrank
