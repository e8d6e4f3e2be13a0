#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dfs/dataset.hpp"
#include "dfs/engine.hpp"

namespace dfs {

// Everything a run needs: engine settings, dataset descriptor, output
// location, and the seed list for sweeps. Unknown keys are parse errors.
struct RunConfig {
    EngineConfig engine;
    DatasetDescriptor dataset;
    std::uint64_t dataset_seed = 7;
    std::uint64_t holdout_seed = 8;
    std::string output_dir = "out";
    std::vector<std::uint64_t> seeds;  // defaults to {engine.seed}

    std::vector<std::uint64_t> effective_seeds() const {
        return seeds.empty() ? std::vector<std::uint64_t>{engine.seed} : seeds;
    }
};

// Flat key-value sections: [dataset], [codec], [engine], [output].
// The DFS_SEED environment variable, when set, overrides [engine] seed.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::filesystem::path& path);

std::string config_to_text(const RunConfig& config);

}  // namespace dfs
