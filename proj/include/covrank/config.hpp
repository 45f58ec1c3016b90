#pragma once

// RunConfig: every knob of a run, loaded from JSON over a preset. Unknown
// keys and out-of-range values raise Error(config) naming the key.

#include <cstdint>
#include <filesystem>
#include <string>

#include "covrank/engine.hpp"
#include "covrank/synthgen.hpp"
#include "json.hpp"

namespace covrank {

enum class Protocol { loo, cross };

struct EvalSettings {
  Protocol protocol = Protocol::loo;
  bool statement = true;
  bool method = true;
  std::size_t threads = 0;  // 0: hardware concurrency
};

struct RunConfig {
  std::string preset = "default";
  std::uint64_t seed = 1;
  synth::BenchmarkConfig generate;
  EngineConfig engine;
  EvalSettings evaluation;
  std::string dataset;  // input dataset file or directory
  std::string out;      // artifact directory
  std::string model;    // model directory
};

/// Defaults: k=8 filters, 3x3 cores, L=16, lr=0.003, batch=32, 100 epochs.
RunConfig default_config();

/// "desk" or "thorough"; anything else raises Error(config).
RunConfig preset_config(const std::string& name);

/// Overlays j onto c. Raises Error(config) on unknown keys or bad types.
void apply_json(RunConfig& c, const nlohmann::json& j);

/// Reads a JSON file and overlays it.
void apply_file(RunConfig& c, const std::filesystem::path& path);

/// Sets the run seed and the generator, feature and engine seeds derived
/// from it.
void set_seed(RunConfig& c, std::uint64_t seed);

/// Range checks; raises Error(config) naming the key.
void validate_config(const RunConfig& c);

/// Complete, canonical JSON (every key, sorted).
nlohmann::json config_to_json(const RunConfig& c);

/// Config rebuilt from config_to_json output.
RunConfig config_from_json(const nlohmann::json& j);

std::string protocol_name(Protocol p);

std::size_t worker_threads(const RunConfig& c);

}  // namespace covrank
