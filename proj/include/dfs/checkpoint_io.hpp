#pragma once

#include <filesystem>
#include <string>

#include "dfs/engine.hpp"

namespace dfs {

// Checkpoints are a single JSON document: plain values for config and
// schedule parameters, base64-encoded little-endian f64 arrays for all
// parameter payloads. Saving a loaded checkpoint reproduces it byte for
// byte.
std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace dfs
