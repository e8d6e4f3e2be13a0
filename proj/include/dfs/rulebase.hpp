#pragma once

#include <cstddef>
#include <vector>

#include "dfs/tensor.hpp"

namespace dfs {

// Shared noise schedule. beta is non-decreasing in (0,1); alpha_bar[t-1]
// is the running product of (1 - beta) up to step t.
struct NoiseSchedule {
    std::size_t steps = 0;
    std::vector<double> beta;       // beta[t-1], t = 1..T
    std::vector<double> alpha;      // 1 - beta[t-1]
    std::vector<double> alpha_bar;  // prod_{s<=t} alpha[s-1]

    double beta_at(std::size_t t) const { return beta[t - 1]; }
    double alpha_at(std::size_t t) const { return alpha[t - 1]; }
    // alpha_bar_at(0) == 1 by convention.
    double alpha_bar_at(std::size_t t) const {
        return t == 0 ? 1.0 : alpha_bar[t - 1];
    }
};

NoiseSchedule linear_schedule(std::size_t steps, double beta_start, double beta_end);

// One forward rule consequent: sqrt(1-beta_t) * z_prev + sqrt(beta_t) * eps.
Latent forward_gen(const Latent& z_prev, std::size_t t,
                   const NoiseSchedule& schedule, const Latent& eps);

// One backward rule consequent, the exact algebraic inverse of forward_gen:
// (z_t - sqrt(beta_t) * eps_hat) / sqrt(1-beta_t). No stochastic term.
Latent backward_gen(const Latent& z_t, std::size_t t,
                    const NoiseSchedule& schedule, const Latent& eps_hat);

// Conventional posterior-mean reverse step, kept for comparison runs:
// (z_t - beta_t / sqrt(1-alpha_bar_t) * eps_hat) / sqrt(alpha_t).
Latent backward_posterior(const Latent& z_t, std::size_t t,
                          const NoiseSchedule& schedule, const Latent& eps_hat);

// Closed-form forward marginal: sqrt(abar_t) * z0 + sqrt(1-abar_t) * eps.
Latent forward_marginal(const Latent& z0, std::size_t t,
                        const NoiseSchedule& schedule, const Latent& eps);

}  // namespace dfs
