#pragma once

// Statement- and method-level localization models. Each model holds one
// encoder per input channel and a classifier over the broadcast Hadamard
// fusion of the channel encodings. Encoders train first against the
// element labels through an auxiliary head; the classifier trains on the
// fused tensors of the frozen encoders.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covrank/features.hpp"
#include "covrank/network.hpp"
#include "covrank/ranking.hpp"
#include "covrank/train.hpp"
#include "json.hpp"

namespace covrank {

struct EngineConfig {
  FeatureConfig features;
  std::size_t filters = 8;
  std::size_t core_h = 3;
  std::size_t core_w = 3;
  std::size_t out_len = 16;  // L_ss = L_ms = L_cs = L_sm = L_mm = L_cm
  TrainConfig train;          // classifier schedule
  std::size_t encoder_epochs = 100;
  bool normalize_fused = true;
  std::uint64_t seed = 0;
};

nlohmann::json engine_config_to_json(const EngineConfig& c);

/// Scalar shift and scale applied to every fused tensor.
struct FusedStats {
  double mean = 0.0;
  double scale = 1.0;
};

enum class Level { statement, method };

std::string level_name(Level level);

struct Model {
  Level level = Level::statement;
  EngineConfig config;
  // Statement channels: ss, ms, cs. Method channels: sm, mm, cm.
  std::vector<std::string> channel_names;
  std::vector<std::optional<Network>> encoders;  // nullopt: channel disabled, encoding is all ones
  Network classifier;
  FusedStats stats;
  std::size_t train_elements = 0;
  std::size_t train_positives = 0;
};

/// Training elements for one level drawn from the given bugs.
Model train_model(Level level, std::span<const BugFeatures* const> bugs, const EngineConfig& config);

/// Fused classifier input of one statement (statement level) or one method.
NdArray statement_tensor(const Model& model, const MethodFeatures& method, std::size_t stmt);
NdArray method_tensor(const Model& model, const MethodFeatures& method);

/// Faulty-class probability of every statement of a method.
std::vector<double> statement_scores(const Model& model, const MethodFeatures& method);
RankedList localize_statements(const Model& model, const MethodFeatures& method);

/// Faulty-class probability of every method of a bug.
std::vector<double> method_scores(const Model& model, const BugFeatures& bug);
RankedList localize_methods(const Model& model, const BugFeatures& bug);

/// Elements of one bug scored by a model or a baseline, flattened across
/// methods for the statement level.
struct ScoredElement {
  std::string method_id;
  std::optional<std::size_t> stmt;  // absent at method level
  double score = 0.0;
  bool faulty = false;
};

std::vector<ScoredElement> score_bug(const Model& model, const BugFeatures& bug);

enum class Baseline { ochiai, dstar };

/// Statement-level baseline scores, pooled across the methods of a bug.
std::vector<ScoredElement> baseline_statements(const BugFeatures& bug, Baseline b);
/// Method-level baseline: the best statement score inside each method.
std::vector<ScoredElement> baseline_methods(const BugFeatures& bug, Baseline b);

/// Writes <dir>/<level>_<channel>.{bin,json}, <dir>/<level>_classifier.{bin,json}
/// and <dir>/<level>_model.json. Existing files are replaced.
void save_model(const Model& model, const std::filesystem::path& dir, const nlohmann::json& run_config = {});
Model load_model(const std::filesystem::path& dir, Level level, const EngineConfig& config);
bool model_exists(const std::filesystem::path& dir, Level level);

/// Engine config stored with a saved model.
nlohmann::json load_model_run_config(const std::filesystem::path& dir, Level level);

}  // namespace covrank
