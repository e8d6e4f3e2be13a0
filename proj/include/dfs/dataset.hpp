#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dfs/rng.hpp"
#include "dfs/tensor.hpp"

namespace dfs {

// n-by-d sample matrix with one categorical label per row.
struct SampleSet {
    Tensor samples;
    std::vector<int> labels;

    std::size_t size() const { return samples.rows(); }
    std::size_t dim() const { return samples.cols(); }

    std::vector<int> distinct_labels() const;
    std::vector<Latent> rows() const;
};

struct Mixture2dSpec {
    std::vector<std::array<double, 2>> means = {{-4.0, 0.0}, {4.0, 0.0}, {0.0, 6.0}};
    double cov_scale = 1.0;
    std::size_t n_per_mode = 200;
};

struct Shapes16Spec {
    std::vector<std::string> classes = {"disk", "cross", "square"};
    std::size_t n_per_class = 100;
    double noise = 0.02;
};

struct DatasetDescriptor {
    enum class Kind { Mixture2d, Shapes16 };
    Kind kind = Kind::Mixture2d;
    Mixture2dSpec mixture;
    Shapes16Spec shapes;
};

// Purely a function of (descriptor, seed).
SampleSet gen_data(const DatasetDescriptor& descriptor, std::uint64_t seed);

// data.csv (header row: label,x0,...) plus manifest.json with the
// descriptor and seed that produced it.
void save_dataset(const std::filesystem::path& dir, const SampleSet& data,
                  const DatasetDescriptor& descriptor, std::uint64_t seed);
SampleSet load_dataset(const std::filesystem::path& csv_path);

std::string descriptor_to_json(const DatasetDescriptor& d, std::uint64_t seed);

}  // namespace dfs
