#pragma once

#include <cstdint>
#include <vector>

#include "dfs/tensor.hpp"

namespace dfs {

// Categorical condition with a fixed embedding vector. Embeddings are the
// columns of a seeded random rotation applied to one-hot labels, so two
// conditions are orthonormal exactly when their labels differ.
struct Condition {
    int label = 0;
    Latent embedding;
};

Condition make_condition(int label, std::size_t dim, std::uint64_t seed);

}  // namespace dfs
