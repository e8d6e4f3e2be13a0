#pragma once

#include <cstddef>
#include <vector>

#include "dfs/condition.hpp"
#include "dfs/rng.hpp"
#include "dfs/rulebase.hpp"
#include "dfs/tensor.hpp"

namespace dfs {

// Feature/semantic balance for similarity-based memberships.
struct MembershipParams {
    double alpha = 0.5;
};

enum class TrajectoryMode { Mean, Sampled };

// The noised sequence of one subset representative. d_seq[t] is the
// representative at diffusion step t (d_seq[0] is the clean latent); the
// forward and backward rules of a path share this sequence.
struct RepresentativeTrajectory {
    std::size_t path_id = 0;
    Latent d;
    std::vector<Latent> d_seq;  // size steps + 1
    int condition_label = 0;

    const Latent& at(std::size_t t) const { return d_seq[t]; }
};

// PAM-style k-medoids: k-medoids++ seeding followed by greedy swaps, best
// of `restarts` restarts. Returns indices into `latents`. Cost is the sum
// of Euclidean distances to the nearest medoid.
std::vector<std::size_t> kmedoids(const std::vector<Latent>& latents,
                                  std::size_t k, RngStream& rng,
                                  std::size_t max_iter = 100,
                                  std::size_t restarts = 10);

double kmedoids_cost(const std::vector<Latent>& latents,
                     const std::vector<std::size_t>& medoids);

RepresentativeTrajectory build_trajectory(const Latent& d,
                                          const NoiseSchedule& schedule,
                                          TrajectoryMode mode, RngStream& rng,
                                          std::size_t path_id = 0,
                                          int condition_label = 0);

// Similarity-based membership: alpha * semantic + (1 - alpha) * feature,
// both terms being cosine01 similarities.
double smc(const Latent& z, const Latent& d, const Condition& cond_z,
           const Condition& cond_d, const MembershipParams& params);

}  // namespace dfs
