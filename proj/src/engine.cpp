#include "covrank/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "covrank/checkpoint.hpp"
#include "covrank/error.hpp"
#include "covrank/rng.hpp"

namespace covrank {

namespace {

constexpr std::size_t kSim = std::tuple_size_v<SimilarityVector>;

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

NetworkSpec conv_spec(Shape input, const EngineConfig& c, bool reduce = false) {
  NetworkSpec s;
  s.input = std::move(input);
  s.reduce_axis1 = reduce;
  s.conv = true;
  s.filters = c.filters;
  s.core_h = c.core_h;
  s.core_w = c.core_w;
  s.out_len = c.out_len;
  s.head = true;
  return s;
}

NetworkSpec fc_spec(Shape input, const EngineConfig& c) {
  NetworkSpec s = conv_spec(std::move(input), c);
  s.conv = false;
  return s;
}

std::vector<NetworkSpec> channel_specs(Level level, const EngineConfig& c) {
  const FeatureConfig& f = c.features;
  if (level == Level::statement) {
    return {conv_spec({1, f.tests, f.dim}, c), conv_spec({f.mutants, f.tests, f.dim}, c),
            fc_spec({f.token_window, f.token_dim}, c)};
  }
  return {conv_spec({f.dim, f.stmts, f.tests}, c), conv_spec({f.dim, f.mutants, f.stmts, f.tests}, c, true),
          fc_spec({f.path_len, f.token_dim}, c)};
}

NetworkSpec classifier_spec(Level level, const EngineConfig& c) {
  const std::size_t L = c.out_len;
  if (level == Level::statement) return conv_spec({L, L, L}, c);
  return conv_spec({L, kSim, L, L}, c, true);
}

std::vector<std::string> channel_names(Level level) {
  if (level == Level::statement) return {"ss", "ms", "cs"};
  return {"sm", "mm", "cm"};
}

// Input of channel ch for one element; nullptr when the element lacks it.
const NdArray* channel_input(Level level, std::size_t ch, const MethodFeatures& m, std::size_t stmt) {
  if (level == Level::statement) {
    switch (ch) {
      case 0:
        return &m.x_ss.at(stmt);
      case 1:
        return stmt < m.x_ms.size() ? &m.x_ms[stmt] : nullptr;
      default:
        return stmt < m.x_cs.size() ? &m.x_cs[stmt] : nullptr;
    }
  }
  switch (ch) {
    case 0:
      return &m.x_sm;
    case 1:
      return m.x_mm.empty() ? nullptr : &m.x_mm;
    default:
      return m.x_cm.empty() ? nullptr : &m.x_cm;
  }
}

bool channel_toggled(Level, std::size_t ch, const Toggles& t) {
  if (ch == 1) return t.mutation;
  if (ch == 2) return t.code_rep;
  return true;
}

struct Element {
  const MethodFeatures* method;
  std::size_t stmt;
  std::size_t label;
};

std::vector<Element> elements(Level level, std::span<const BugFeatures* const> bugs) {
  std::vector<Element> out;
  for (const BugFeatures* b : bugs) {
    for (const auto& m : b->methods) {
      if (level == Level::statement) {
        for (std::size_t i = 0; i < m.statements; ++i) out.push_back({&m, i, m.faulty_stmt[i] ? 1u : 0u});
      } else {
        out.push_back({&m, 0, m.faulty ? 1u : 0u});
      }
    }
  }
  return out;
}

std::vector<double> encode(const Model& model, std::size_t ch, const MethodFeatures& m, std::size_t stmt) {
  const auto& enc = model.encoders[ch];
  if (!enc) return ones(model.config.out_len);
  const NdArray* x = channel_input(model.level, ch, m, stmt);
  if (!x) return ones(model.config.out_len);
  return enc->encode(*x);
}

NdArray fuse(const Model& model, const MethodFeatures& m, std::size_t stmt) {
  std::vector<std::vector<double>> v;
  NdArray t;
  if (model.level == Level::statement) {
    v = {encode(model, 0, m, stmt), encode(model, 1, m, stmt), encode(model, 2, m, stmt)};
    t = broadcast_hadamard(v).permuted({2, 0, 1});
  } else {
    v = {encode(model, 2, m, 0), std::vector<double>(m.sim.begin(), m.sim.end()), encode(model, 0, m, 0),
         encode(model, 1, m, 0)};
    t = broadcast_hadamard(v);
  }
  return t;
}

void normalize(NdArray& t, const FusedStats& s) {
  for (double& x : t.values()) x = (x - s.mean) * s.scale;
}

std::string file_base(Level level, const std::string& part) { return level_name(level) + "_" + part; }

}  // namespace

std::string level_name(Level level) { return level == Level::statement ? "stmt" : "method"; }

nlohmann::json engine_config_to_json(const EngineConfig& c) {
  const auto& f = c.features;
  nlohmann::json j;
  j["filters"] = c.filters;
  j["core"] = {c.core_h, c.core_w};
  j["out_len"] = c.out_len;
  j["lr"] = c.train.lr;
  j["batch"] = c.train.batch;
  j["epochs"] = c.train.epochs;
  j["encoder_epochs"] = c.encoder_epochs;
  j["class_weights"] = c.train.class_weights;
  j["clip_norm"] = c.train.clip_norm;
  j["normalize_fused"] = c.normalize_fused;
  j["seed"] = c.seed;
  j["features"] = {{"tests", f.tests},          {"stmts", f.stmts},
                   {"mutants", f.mutants},      {"dim", f.dim},
                   {"token_dim", f.token_dim},  {"token_window", f.token_window},
                   {"path_len", f.path_len},    {"max_paths", f.max_paths},
                   {"standardize", f.standardize},
                   {"ee_mode", f.ee_mode == EeMode::cell ? "cell" : "row"},
                   {"toggles",
                    {{"ordering", f.toggles.ordering},
                     {"ee_marks", f.toggles.ee_marks},
                     {"stat_dep", f.toggles.stat_dep},
                     {"mutation", f.toggles.mutation},
                     {"code_rep", f.toggles.code_rep},
                     {"text_sim", f.toggles.text_sim}}}};
  return j;
}

Model train_model(Level level, std::span<const BugFeatures* const> bugs, const EngineConfig& config) {
  Model model;
  model.level = level;
  model.config = config;
  model.channel_names = channel_names(level);
  const auto elems = elements(level, bugs);
  if (elems.empty()) fail(ErrorKind::training, "train: no " + level_name(level) + " elements");
  model.train_elements = elems.size();
  for (const auto& e : elems) model.train_positives += e.label;

  const auto specs = channel_specs(level, config);
  for (std::size_t ch = 0; ch < specs.size(); ++ch) {
    const std::string name = model.channel_names[ch];
    std::vector<NdArray> xs;
    std::vector<std::size_t> ys;
    if (channel_toggled(level, ch, config.features.toggles)) {
      for (const auto& e : elems) {
        if (const NdArray* x = channel_input(level, ch, *e.method, e.stmt)) {
          xs.push_back(*x);
          ys.push_back(e.label);
        }
      }
    }
    if (xs.empty()) {
      model.encoders.emplace_back(std::nullopt);
      continue;
    }
    const std::uint64_t salt = hash_string(level_name(level) + "/" + name);
    Network net(specs[ch], derive_seed(config.seed, salt));
    TrainConfig tc = config.train;
    tc.epochs = config.encoder_epochs;
    tc.seed = derive_seed(config.seed, salt + 1);
    train(net, xs, ys, tc);
    model.encoders.emplace_back(std::move(net));
  }

  std::vector<NdArray> fused;
  std::vector<std::size_t> labels;
  fused.reserve(elems.size());
  for (const auto& e : elems) {
    fused.push_back(fuse(model, *e.method, e.stmt));
    labels.push_back(e.label);
  }
  if (config.normalize_fused) {
    double sum = 0.0, sq = 0.0, count = 0.0;
    for (const auto& t : fused) {
      for (double x : t.values()) {
        sum += x;
        sq += x * x;
      }
      count += static_cast<double>(t.size());
    }
    const double mean = sum / count;
    const double var = std::max(0.0, sq / count - mean * mean);
    model.stats.mean = mean;
    model.stats.scale = var > 1e-24 ? 1.0 / std::sqrt(var) : 1.0;
    for (auto& t : fused) normalize(t, model.stats);
  }
  const std::uint64_t salt = hash_string(level_name(level) + "/classifier");
  model.classifier = Network(classifier_spec(level, config), derive_seed(config.seed, salt));
  TrainConfig tc = config.train;
  tc.seed = derive_seed(config.seed, salt + 1);
  train(model.classifier, fused, labels, tc);
  return model;
}

NdArray statement_tensor(const Model& model, const MethodFeatures& method, std::size_t stmt) {
  if (model.level != Level::statement) fail(ErrorKind::config, "statement_tensor: model is method level");
  NdArray t = fuse(model, method, stmt);
  if (model.config.normalize_fused) normalize(t, model.stats);
  return t;
}

NdArray method_tensor(const Model& model, const MethodFeatures& method) {
  if (model.level != Level::method) fail(ErrorKind::config, "method_tensor: model is statement level");
  NdArray t = fuse(model, method, 0);
  if (model.config.normalize_fused) normalize(t, model.stats);
  return t;
}

std::vector<double> statement_scores(const Model& model, const MethodFeatures& method) {
  std::vector<double> s;
  s.reserve(method.statements);
  for (std::size_t i = 0; i < method.statements; ++i) {
    s.push_back(model.classifier.probabilities(statement_tensor(model, method, i))[1]);
  }
  return s;
}

RankedList localize_statements(const Model& model, const MethodFeatures& method) {
  return rank_by_score(statement_scores(model, method));
}

std::vector<double> method_scores(const Model& model, const BugFeatures& bug) {
  std::vector<double> s;
  s.reserve(bug.methods.size());
  for (const auto& m : bug.methods) s.push_back(model.classifier.probabilities(method_tensor(model, m))[1]);
  return s;
}

RankedList localize_methods(const Model& model, const BugFeatures& bug) {
  return rank_by_score(method_scores(model, bug));
}

std::vector<ScoredElement> score_bug(const Model& model, const BugFeatures& bug) {
  std::vector<ScoredElement> out;
  if (model.level == Level::statement) {
    for (const auto& m : bug.methods) {
      const auto s = statement_scores(model, m);
      for (std::size_t i = 0; i < s.size(); ++i) out.push_back({m.method_id, i, s[i], m.faulty_stmt[i]});
    }
  } else {
    const auto s = method_scores(model, bug);
    for (std::size_t i = 0; i < s.size(); ++i) {
      out.push_back({bug.methods[i].method_id, std::nullopt, s[i], bug.methods[i].faulty});
    }
  }
  return out;
}

std::vector<ScoredElement> baseline_statements(const BugFeatures& bug, Baseline b) {
  std::vector<ScoredElement> out;
  for (const auto& m : bug.methods) {
    const auto& s = b == Baseline::ochiai ? m.ochiai : m.dstar;
    for (std::size_t i = 0; i < s.size(); ++i) out.push_back({m.method_id, i, s[i], m.faulty_stmt[i]});
  }
  return out;
}

std::vector<ScoredElement> baseline_methods(const BugFeatures& bug, Baseline b) {
  std::vector<ScoredElement> out;
  for (const auto& m : bug.methods) {
    const auto& s = b == Baseline::ochiai ? m.ochiai : m.dstar;
    const double best = s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
    out.push_back({m.method_id, std::nullopt, best, m.faulty});
  }
  return out;
}

void save_model(const Model& model, const std::filesystem::path& dir, const nlohmann::json& run_config) {
  std::filesystem::create_directories(dir);
  nlohmann::json meta;
  meta["level"] = level_name(model.level);
  meta["engine"] = engine_config_to_json(model.config);
  meta["stats"] = {{"mean", model.stats.mean}, {"scale", model.stats.scale}};
  meta["train_elements"] = model.train_elements;
  meta["train_positives"] = model.train_positives;
  meta["run_config"] = run_config;
  nlohmann::json channels = nlohmann::json::object();
  for (std::size_t ch = 0; ch < model.encoders.size(); ++ch) {
    const std::string& name = model.channel_names[ch];
    channels[name] = model.encoders[ch].has_value();
    const auto base = dir / file_base(model.level, name);
    if (model.encoders[ch]) {
      save_checkpoint(base, *model.encoders[ch], {{"channel", name}, {"level", level_name(model.level)}});
    } else {
      std::filesystem::remove(base.string() + ".bin");
      std::filesystem::remove(base.string() + ".json");
    }
  }
  meta["channels"] = channels;
  save_checkpoint(dir / file_base(model.level, "classifier"), model.classifier,
                  {{"channel", "classifier"}, {"level", level_name(model.level)}});
  std::ofstream out(dir / (file_base(model.level, "model") + ".json"), std::ios::binary);
  if (!out) fail(ErrorKind::data, "cannot write model description in " + dir.string());
  out << meta.dump(2) << '\n';
}

bool model_exists(const std::filesystem::path& dir, Level level) {
  return std::filesystem::exists(dir / (file_base(level, "model") + ".json"));
}

nlohmann::json load_model_run_config(const std::filesystem::path& dir, Level level) {
  const auto path = dir / (file_base(level, "model") + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::data, "no " + level_name(level) + " model in " + dir.string());
  try {
    return nlohmann::json::parse(in).value("run_config", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::data, path.string() + ": " + e.what());
  }
}

Model load_model(const std::filesystem::path& dir, Level level, const EngineConfig& config) {
  const auto path = dir / (file_base(level, "model") + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::data, "no " + level_name(level) + " model in " + dir.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::data, path.string() + ": " + e.what());
  }
  Model model;
  model.level = level;
  model.config = config;
  model.channel_names = channel_names(level);
  const auto specs = channel_specs(level, config);
  for (std::size_t ch = 0; ch < specs.size(); ++ch) {
    const std::string& name = model.channel_names[ch];
    if (!meta.at("channels").value(name, false)) {
      model.encoders.emplace_back(std::nullopt);
      continue;
    }
    auto ck = load_checkpoint(dir / file_base(level, name));
    if (ck.net.spec() != Network(specs[ch], 0).spec()) {
      fail(ErrorKind::config, "model channel " + name + " does not match the configured shapes");
    }
    model.encoders.emplace_back(std::move(ck.net));
  }
  auto ck = load_checkpoint(dir / file_base(level, "classifier"));
  if (ck.net.spec() != Network(classifier_spec(level, config), 0).spec()) {
    fail(ErrorKind::config, "model classifier does not match the configured shapes");
  }
  model.classifier = std::move(ck.net);
  model.stats.mean = meta.at("stats").at("mean").get<double>();
  model.stats.scale = meta.at("stats").at("scale").get<double>();
  model.train_elements = meta.value("train_elements", std::size_t{0});
  model.train_positives = meta.value("train_positives", std::size_t{0});
  return model;
}

}  // namespace covrank
