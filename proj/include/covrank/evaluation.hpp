#pragma once

// Leave-one-out and cross-project evaluation, baselines and ablations.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covrank/config.hpp"
#include "covrank/engine.hpp"
#include "covrank/metrics.hpp"
#include "json.hpp"

namespace covrank {

struct LevelReport {
  Metrics overall;
  std::map<std::string, Metrics> projects;
  Metrics ochiai;
  Metrics dstar;
  std::size_t tie_heavy_bugs = 0;
  Metrics tie_heavy;
  Metrics tie_heavy_ochiai;
  Metrics tie_heavy_dstar;
  double random_top1 = 0.0;  // expected counts of a uniform random ranker
  double random_top3 = 0.0;
  double random_top5 = 0.0;
  std::vector<RankedBug> bugs;  // model rankings in fold order
};

struct EvalReport {
  Protocol protocol = Protocol::loo;
  std::string variant = "full";
  std::size_t folds = 0;
  std::optional<LevelReport> statement;
  std::optional<LevelReport> method;
};

/// One train/test split: indices are (project, bug) pairs.
struct Fold {
  std::vector<std::pair<std::size_t, std::size_t>> train;
  std::vector<std::pair<std::size_t, std::size_t>> test;
};

/// Per test bug, the other bugs of its project. Throws Error(evaluation) on
/// a project with fewer than two bugs.
std::vector<Fold> leave_one_out_folds(const std::vector<ProjectFeatures>& projects);
/// Per project, the bugs of every other project. Throws Error(evaluation)
/// with fewer than two projects.
std::vector<Fold> cross_project_folds(const std::vector<ProjectFeatures>& projects);

/// Trains and scores every fold; folds run on `threads` workers with seeds
/// derived from (engine.seed, fold index) and are aggregated in fold order.
EvalReport evaluate_folds(const std::vector<ProjectFeatures>& projects, const std::vector<Fold>& folds,
                          const EngineConfig& engine, const EvalSettings& settings);

EvalReport run_leave_one_out(const std::vector<ProjectFeatures>& projects, const EngineConfig& engine,
                             const EvalSettings& settings);
EvalReport run_cross_project(const std::vector<ProjectFeatures>& projects, const EngineConfig& engine,
                             const EvalSettings& settings);

/// Builds features for the configured toggles and runs the configured protocol.
EvalReport evaluate_datasets(const std::vector<ProjectDataset>& datasets, const RunConfig& config);

struct Variant {
  std::string name;
  Toggles toggles;
};

/// Base (no ordering, no dependency vectors), Base+Order, and the full pipeline.
std::vector<Variant> incremental_variants();
/// "full" plus one variant per disabled flag. Flags: ordering, ee_marks,
/// stat_dep, mutation, code_rep, text_sim. Unknown flags raise Error(config).
std::vector<Variant> ablation_variants(const std::vector<std::string>& flags);

std::vector<EvalReport> ablate(const std::vector<ProjectDataset>& datasets, const RunConfig& config,
                               const std::vector<Variant>& variants);

nlohmann::json metrics_to_json(const Metrics& m);
nlohmann::json report_to_json(const EvalReport& r);
std::string report_table(const EvalReport& r);

}  // namespace covrank
