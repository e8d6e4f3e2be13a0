#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "dfs/condition.hpp"
#include "dfs/fuzzification.hpp"
#include "dfs/rng.hpp"
#include "dfs/tensor.hpp"

namespace dfs {

// Linear encoder/decoder pair. When latent_dim == sample_dim the maps are
// initialized at the identity, which round-trips exactly without training.
struct Codec {
    std::size_t sample_dim = 0;
    std::size_t latent_dim = 0;
    std::vector<double> enc_w;  // latent_dim x sample_dim, row-major
    std::vector<double> enc_b;  // latent_dim
    std::vector<double> dec_w;  // sample_dim x latent_dim, row-major
    std::vector<double> dec_b;  // sample_dim
    Latent representative;      // an actual data point, in sample space
    Condition representative_condition;
};

struct CodecRegistry {
    std::vector<Codec> codecs;

    std::size_t size() const { return codecs.size(); }
    std::size_t sample_dim() const {
        return codecs.empty() ? 0 : codecs.front().sample_dim;
    }
};

// Index of the point minimizing total Euclidean distance to all others.
std::size_t medoid_index(const std::vector<Latent>& data);

// Fits the pair by Adam on mean squared reconstruction error; the
// representative is the exact dataset medoid under Euclidean distance.
Codec train_codec(const std::vector<Latent>& dataset, std::size_t latent_dim,
                  std::size_t epochs, RngStream& rng,
                  const Condition& representative_condition);

Codec identity_codec(std::size_t dim, const Latent& representative,
                     const Condition& representative_condition);

// Returns (argmax index, membership per codec); ties resolve to the lowest
// index. Memberships compare x against each codec's representative.
std::pair<std::size_t, std::vector<double>> select_codec(
    const CodecRegistry& registry, const Latent& x, const Condition& cond,
    const MembershipParams& params = {});

Latent encode(const Codec& codec, const Latent& x);
Latent decode(const Codec& codec, const Latent& z);

}  // namespace dfs
