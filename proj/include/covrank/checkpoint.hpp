#pragma once

// Model checkpoints: <base>.bin holds an 8-byte magic "CVRKCKPT", a u32
// format version, a u32 reserved word, a u64 parameter count, then the
// flattened parameters as little-endian IEEE-754 doubles. <base>.json is a
// sidecar with the network layout and caller-supplied metadata.

#include <filesystem>

#include "covrank/network.hpp"
#include "json.hpp"

namespace covrank {

inline constexpr std::uint32_t kCheckpointVersion = 1;

nlohmann::json spec_to_json(const NetworkSpec& spec);
NetworkSpec spec_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& base, const Network& net, const nlohmann::json& meta = {});

struct LoadedCheckpoint {
  Network net;
  nlohmann::json meta;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& base);

}  // namespace covrank
