#pragma once

#include <cstddef>
#include <vector>

#include "dfs/condition.hpp"
#include "dfs/rng.hpp"
#include "dfs/tensor.hpp"

namespace dfs {

// Conditional noise-prediction MLP. Input is (latent || time embedding ||
// condition embedding); hidden layers use SiLU, the output layer is linear.
struct DenoiserArch {
    std::size_t latent_dim = 2;
    std::size_t time_dim = 16;
    std::size_t cond_dim = 8;
    std::size_t hidden_width = 128;
    std::size_t hidden_layers = 2;

    std::size_t input_dim() const { return latent_dim + time_dim + cond_dim; }
    std::size_t num_layers() const { return hidden_layers + 1; }
    std::size_t layer_in(std::size_t l) const {
        return l == 0 ? input_dim() : hidden_width;
    }
    std::size_t layer_out(std::size_t l) const {
        return l == num_layers() - 1 ? latent_dim : hidden_width;
    }
};

// Weights and biases stored flat, layer by layer (row-major W, then b).
struct DenoiserParams {
    DenoiserArch arch;
    std::vector<double> values;

    std::size_t layer_offset(std::size_t l) const;
};

struct OptimizerState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct NoiseExample {
    Latent z_t;
    Latent eps;
    std::size_t t = 1;
    Condition cond;
    double weight = 1.0;
};

std::size_t param_count(const DenoiserArch& arch);

// Smallest hidden width whose parameter count is within 2% of k times the
// count at `arch`; used for capacity-matched single-path baselines.
std::size_t matched_single_path_width(const DenoiserArch& arch, std::size_t k);

// Interleaved sin/cos of t over geometrically spaced frequencies.
Latent time_embedding(std::size_t t, std::size_t total_steps, std::size_t dim);

DenoiserParams init_denoiser(const DenoiserArch& arch, RngStream& rng);

Latent predict_noise(const DenoiserParams& params, const Latent& z,
                     std::size_t t, std::size_t total_steps,
                     const Condition& cond);

// Weighted squared-residual loss over the batch and its exact gradient:
// sum_i w_i * ||eps_i - predict(z_i, t_i, cond_i)||^2.
std::pair<double, std::vector<double>> loss_and_grads(
    const DenoiserParams& params, const std::vector<NoiseExample>& batch,
    std::size_t total_steps);

void adam_step(std::vector<double>& values, const std::vector<double>& grads,
               OptimizerState& state, double lr);

void adam_step(DenoiserParams& params, const std::vector<double>& grads,
               OptimizerState& state, double lr);

// Compares analytic gradients against central finite differences on
// n_coords sampled coordinates; returns the max relative error.
double finite_diff_check(const DenoiserParams& params,
                         const std::vector<NoiseExample>& batch,
                         std::size_t total_steps, std::size_t n_coords,
                         RngStream& rng);

}  // namespace dfs
