#include "covrank/config.hpp"

#include <fstream>
#include <thread>

#include "covrank/error.hpp"
#include "covrank/rng.hpp"

namespace covrank {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  fail(ErrorKind::config, "config key '" + key + "': " + why);
}

[[noreturn]] void unknown(const std::string& key) { fail(ErrorKind::config, "unknown config key '" + key + "'"); }

std::string join(const std::string& prefix, const std::string& key) { return prefix.empty() ? key : prefix + "." + key; }

void read(const json& v, const std::string& key, std::size_t& out) {
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    bad(key, "expected a non-negative integer");
  }
  out = v.get<std::size_t>();
}

void read(const json& v, const std::string& key, std::int64_t& out) {
  if (!v.is_number_integer()) bad(key, "expected an integer");
  out = v.get<std::int64_t>();
}

void read(const json& v, const std::string& key, double& out) {
  if (!v.is_number()) bad(key, "expected a number");
  out = v.get<double>();
}

void read(const json& v, const std::string& key, bool& out) {
  if (!v.is_boolean()) bad(key, "expected true or false");
  out = v.get<bool>();
}

void read(const json& v, const std::string& key, std::string& out) {
  if (!v.is_string()) bad(key, "expected a string");
  out = v.get<std::string>();
}

void require_object(const json& j, const std::string& key) {
  if (!j.is_object()) bad(key.empty() ? "<root>" : key, "expected an object");
}

void apply_sgns(SgnsConfig& s, const json& j, const std::string& p) {
  require_object(j, p);
  for (const auto& [k, v] : j.items()) {
    const auto key = join(p, k);
    if (k == "window") read(v, key, s.window);
    else if (k == "negatives") read(v, key, s.negatives);
    else if (k == "epochs") read(v, key, s.epochs);
    else if (k == "lr") read(v, key, s.lr);
    else unknown(key);
  }
}

void apply_node2vec(Node2VecConfig& n, const json& j, const std::string& p) {
  require_object(j, p);
  for (const auto& [k, v] : j.items()) {
    const auto key = join(p, k);
    if (k == "walk_len") read(v, key, n.walk_len);
    else if (k == "walks_per_node") read(v, key, n.walks_per_node);
    else if (k == "p") read(v, key, n.p);
    else if (k == "q") read(v, key, n.q);
    else if (k == "artificial_edge_mass") read(v, key, n.artificial_edge_mass);
    else unknown(key);
  }
}

void apply_toggles(Toggles& t, const json& j, const std::string& p) {
  require_object(j, p);
  for (const auto& [k, v] : j.items()) {
    const auto key = join(p, k);
    if (k == "ordering") read(v, key, t.ordering);
    else if (k == "ee_marks") read(v, key, t.ee_marks);
    else if (k == "stat_dep") read(v, key, t.stat_dep);
    else if (k == "mutation") read(v, key, t.mutation);
    else if (k == "code_rep") read(v, key, t.code_rep);
    else if (k == "text_sim") read(v, key, t.text_sim);
    else unknown(key);
  }
}

void apply_features(FeatureConfig& f, const json& j, const std::string& p) {
  require_object(j, p);
  for (const auto& [k, v] : j.items()) {
    const auto key = join(p, k);
    if (k == "tests") read(v, key, f.tests);
    else if (k == "stmts") read(v, key, f.stmts);
    else if (k == "mutants") read(v, key, f.mutants);
    else if (k == "dim") read(v, key, f.dim);
    else if (k == "token_dim") read(v, key, f.token_dim);
    else if (k == "token_window") read(v, key, f.token_window);
    else if (k == "path_len") read(v, key, f.path_len);
    else if (k == "max_paths") read(v, key, f.max_paths);
    else if (k == "standardize") read(v, key, f.standardize);
    else if (k == "ee_mode") {
      std::string s;
      read(v, key, s);
      if (s == "cell") f.ee_mode = EeMode::cell;
      else if (s == "row") f.ee_mode = EeMode::row;
      else bad(key, "expected \"cell\" or \"row\"");
    } else if (k == "toggles") apply_toggles(f.toggles, v, key);
    else if (k == "sgns") apply_sgns(f.sgns, v, key);
    else if (k == "node2vec") apply_node2vec(f.node2vec, v, key);
    else unknown(key);
  }
}

void apply_model(EngineConfig& e, const json& j, const std::string& p) {
  require_object(j, p);
  for (const auto& [k, v] : j.items()) {
    const auto key = join(p, k);
    if (k == "filters") read(v, key, e.filters);
    else if (k == "core") {
      if (v.is_array() && v.size() == 2) {
        read(v[0], key, e.core_h);
        read(v[1], key, e.core_w);
      } else {
        read(v, key, e.core_h);
        e.core_w = e.core_h;
      }
    } else if (k == "out_len") read(v, key, e.out_len);
    else if (k == "lr") read(v, key, e.train.lr);
    else if (k == "batch") read(v, key, e.train.batch);
    else if (k == "epochs") read(v, key, e.train.epochs);
    else if (k == "encoder_epochs") read(v, key, e.encoder_epochs);
    else if (k == "class_weights") read(v, key, e.train.class_weights);
    else if (k == "clip_norm") read(v, key, e.train.clip_norm);
    else if (k == "normalize_fused") read(v, key, e.normalize_fused);
    else unknown(key);
  }
}

void apply_generate(synth::BenchmarkConfig& g, const json& j, const std::string& p) {
  require_object(j, p);
  for (const auto& [k, v] : j.items()) {
    const auto key = join(p, k);
    if (k == "bugs") read(v, key, g.bugs);
    else if (k == "projects") read(v, key, g.projects);
    else if (k == "tests_per_bug") read(v, key, g.tests_per_bug);
    else if (k == "distractors") read(v, key, g.distractors);
    else if (k == "min_size") read(v, key, g.min_size);
    else if (k == "max_size") read(v, key, g.max_size);
    else if (k == "p_faulty_invoked") read(v, key, g.p_faulty_invoked);
    else if (k == "p_other_invoked") read(v, key, g.p_other_invoked);
    else if (k == "input_range") read(v, key, g.input_range);
    else if (k == "resample_budget") read(v, key, g.resample_budget);
    else if (k == "mutators") {
      if (!v.is_array()) bad(key, "expected a list of mutator names");
      g.mutators.clear();
      for (const auto& m : v) {
        std::string s;
        read(m, key, s);
        const auto mu = mini::mutator_from_string(s);
        if (!mu) bad(key, "unknown mutator \"" + s + "\"");
        g.mutators.push_back(*mu);
      }
    } else unknown(key);
  }
}

void apply_evaluation(EvalSettings& e, const json& j, const std::string& p) {
  require_object(j, p);
  for (const auto& [k, v] : j.items()) {
    const auto key = join(p, k);
    if (k == "protocol") {
      std::string s;
      read(v, key, s);
      if (s == "loo") e.protocol = Protocol::loo;
      else if (s == "cross") e.protocol = Protocol::cross;
      else bad(key, "expected \"loo\" or \"cross\"");
    } else if (k == "statement") read(v, key, e.statement);
    else if (k == "method") read(v, key, e.method);
    else if (k == "threads") read(v, key, e.threads);
    else unknown(key);
  }
}

void in_range(const std::string& key, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi)) {
    bad(key, "value " + json(v).dump() + " outside [" + json(lo).dump() + ", " + json(hi).dump() + "]");
  }
}

}  // namespace

RunConfig default_config() {
  RunConfig c;
  c.engine.filters = 8;
  c.engine.core_h = c.engine.core_w = 3;
  c.engine.out_len = 16;
  c.engine.train.lr = 0.003;
  c.engine.train.batch = 32;
  c.engine.train.epochs = 100;
  c.engine.encoder_epochs = 100;
  c.engine.features.dim = 16;
  c.engine.features.token_dim = 16;
  set_seed(c, c.seed);
  return c;
}

RunConfig preset_config(const std::string& name) {
  RunConfig c = default_config();
  c.preset = name;
  if (name == "desk") {
    c.engine.out_len = 8;
    c.engine.train.epochs = 10;
    c.engine.encoder_epochs = 5;
    c.engine.features.dim = 8;
    c.engine.features.token_dim = 8;
    c.engine.features.sgns.epochs = 3;
    c.engine.features.node2vec.walks_per_node = 5;
  } else if (name == "thorough") {
    c.engine.filters = 9;
    c.engine.core_h = c.engine.core_w = 5;
    c.engine.train.epochs = 200;
    c.engine.train.batch = 64;
    c.engine.encoder_epochs = 100;
    c.generate.bugs = 400;
  } else {
    fail(ErrorKind::config, "unknown preset '" + name + "' (expected desk or thorough)");
  }
  set_seed(c, c.seed);
  return c;
}

void apply_json(RunConfig& c, const json& j) {
  require_object(j, "");
  for (const auto& [k, v] : j.items()) {
    if (k == "seed") {
      std::uint64_t s = 0;
      read(v, k, s);
      set_seed(c, s);
    } else if (k == "preset") read(v, k, c.preset);
    else if (k == "generate") apply_generate(c.generate, v, k);
    else if (k == "features") apply_features(c.engine.features, v, k);
    else if (k == "model") apply_model(c.engine, v, k);
    else if (k == "evaluation") apply_evaluation(c.evaluation, v, k);
    else if (k == "dataset") read(v, k, c.dataset);
    else if (k == "out") read(v, k, c.out);
    else if (k == "model_dir") read(v, k, c.model);
    else unknown(k);
  }
}

void apply_file(RunConfig& c, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::config, "cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::config, path.string() + ": malformed JSON: " + e.what());
  }
  apply_json(c, j);
}

void set_seed(RunConfig& c, std::uint64_t seed) {
  c.seed = seed;
  c.generate.seed = seed;
  c.engine.seed = derive_seed(seed, hash_string("engine"));
  c.engine.features.seed = derive_seed(seed, hash_string("features"));
}

void validate_config(const RunConfig& c) {
  const auto& g = c.generate;
  const auto& e = c.engine;
  const auto& f = e.features;
  in_range("generate.bugs", static_cast<double>(g.bugs), 1, 100000);
  in_range("generate.projects", static_cast<double>(g.projects), 1, 1000);
  in_range("generate.tests_per_bug", static_cast<double>(g.tests_per_bug), 1, 1000);
  in_range("generate.distractors", static_cast<double>(g.distractors), 0, 100);
  in_range("generate.min_size", static_cast<double>(g.min_size), synth::kMinProgramSize, synth::kMaxProgramSize);
  in_range("generate.max_size", static_cast<double>(g.max_size), static_cast<double>(g.min_size),
           synth::kMaxProgramSize);
  in_range("generate.p_faulty_invoked", g.p_faulty_invoked, 0, 1);
  in_range("generate.p_other_invoked", g.p_other_invoked, 0, 1);
  in_range("generate.input_range", static_cast<double>(g.input_range), 1, 1e6);
  in_range("generate.resample_budget", static_cast<double>(g.resample_budget), 1, 1e6);
  if (g.mutators.empty()) bad("generate.mutators", "at least one mutator is required");
  in_range("features.tests", static_cast<double>(f.tests), 1, 512);
  in_range("features.stmts", static_cast<double>(f.stmts), 1, 512);
  in_range("features.mutants", static_cast<double>(f.mutants), 1, 64);
  in_range("features.dim", static_cast<double>(f.dim), 1, 512);
  in_range("features.token_dim", static_cast<double>(f.token_dim), 1, 512);
  in_range("features.token_window", static_cast<double>(f.token_window), 1, 256);
  in_range("features.path_len", static_cast<double>(f.path_len), 3, 256);
  in_range("features.max_paths", static_cast<double>(f.max_paths), 1, 100000);
  in_range("features.sgns.window", static_cast<double>(f.sgns.window), 1, 64);
  in_range("features.sgns.negatives", static_cast<double>(f.sgns.negatives), 1, 64);
  in_range("features.sgns.epochs", static_cast<double>(f.sgns.epochs), 1, 1000);
  in_range("features.sgns.lr", f.sgns.lr, 1e-6, 1);
  in_range("features.node2vec.walk_len", static_cast<double>(f.node2vec.walk_len), 1, 10000);
  in_range("features.node2vec.walks_per_node", static_cast<double>(f.node2vec.walks_per_node), 1, 10000);
  in_range("features.node2vec.p", f.node2vec.p, 1e-6, 1e6);
  in_range("features.node2vec.q", f.node2vec.q, 1e-6, 1e6);
  in_range("features.node2vec.artificial_edge_mass", f.node2vec.artificial_edge_mass, 0, 1e6);
  in_range("model.filters", static_cast<double>(e.filters), 1, 256);
  in_range("model.core", static_cast<double>(e.core_h), 1, 32);
  in_range("model.core", static_cast<double>(e.core_w), 1, 32);
  in_range("model.out_len", static_cast<double>(e.out_len), 2, 64);
  in_range("model.lr", e.train.lr, 0, 10);
  in_range("model.clip_norm", e.train.clip_norm, 0, 1e12);
  in_range("model.batch", static_cast<double>(e.train.batch), 1, 100000);
  in_range("model.epochs", static_cast<double>(e.train.epochs), 1, 100000);
  in_range("model.encoder_epochs", static_cast<double>(e.encoder_epochs), 1, 100000);
  in_range("evaluation.threads", static_cast<double>(c.evaluation.threads), 0, 1024);
  if (!c.evaluation.statement && !c.evaluation.method) {
    bad("evaluation.statement", "at least one of statement and method must be enabled");
  }
}

std::string protocol_name(Protocol p) { return p == Protocol::loo ? "loo" : "cross"; }

json config_to_json(const RunConfig& c) {
  const auto& g = c.generate;
  const auto& e = c.engine;
  const auto& f = e.features;
  json mutators = json::array();
  for (auto m : g.mutators) mutators.push_back(std::string(mini::to_string(m)));
  json j;
  j["preset"] = c.preset;
  j["seed"] = c.seed;
  j["dataset"] = c.dataset;
  j["out"] = c.out;
  j["model_dir"] = c.model;
  j["generate"] = {{"bugs", g.bugs},
                   {"projects", g.projects},
                   {"tests_per_bug", g.tests_per_bug},
                   {"distractors", g.distractors},
                   {"min_size", g.min_size},
                   {"max_size", g.max_size},
                   {"p_faulty_invoked", g.p_faulty_invoked},
                   {"p_other_invoked", g.p_other_invoked},
                   {"input_range", g.input_range},
                   {"resample_budget", g.resample_budget},
                   {"mutators", mutators}};
  j["features"] = {{"tests", f.tests},
                   {"stmts", f.stmts},
                   {"mutants", f.mutants},
                   {"dim", f.dim},
                   {"token_dim", f.token_dim},
                   {"token_window", f.token_window},
                   {"path_len", f.path_len},
                   {"max_paths", f.max_paths},
                   {"standardize", f.standardize},
                   {"ee_mode", f.ee_mode == EeMode::cell ? "cell" : "row"},
                   {"toggles",
                    {{"ordering", f.toggles.ordering},
                     {"ee_marks", f.toggles.ee_marks},
                     {"stat_dep", f.toggles.stat_dep},
                     {"mutation", f.toggles.mutation},
                     {"code_rep", f.toggles.code_rep},
                     {"text_sim", f.toggles.text_sim}}},
                   {"sgns",
                    {{"window", f.sgns.window},
                     {"negatives", f.sgns.negatives},
                     {"epochs", f.sgns.epochs},
                     {"lr", f.sgns.lr}}},
                   {"node2vec",
                    {{"walk_len", f.node2vec.walk_len},
                     {"walks_per_node", f.node2vec.walks_per_node},
                     {"p", f.node2vec.p},
                     {"q", f.node2vec.q},
                     {"artificial_edge_mass", f.node2vec.artificial_edge_mass}}}};
  j["model"] = {{"filters", e.filters},
                {"core", {e.core_h, e.core_w}},
                {"out_len", e.out_len},
                {"lr", e.train.lr},
                {"batch", e.train.batch},
                {"epochs", e.train.epochs},
                {"encoder_epochs", e.encoder_epochs},
                {"class_weights", e.train.class_weights},
                {"clip_norm", e.train.clip_norm},
                {"normalize_fused", e.normalize_fused}};
  j["evaluation"] = {{"protocol", protocol_name(c.evaluation.protocol)},
                     {"statement", c.evaluation.statement},
                     {"method", c.evaluation.method},
                     {"threads", c.evaluation.threads}};
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c = default_config();
  apply_json(c, j);
  return c;
}

std::size_t worker_threads(const RunConfig& c) {
  if (c.evaluation.threads > 0) return c.evaluation.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace covrank
