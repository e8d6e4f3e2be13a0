#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dfs/rng.hpp"
#include "dfs/tensor.hpp"

namespace dfs {

// Average ranks of k methods over N blocks.
struct RankTable {
    std::vector<std::string> methods;
    std::vector<double> average_ranks;
    std::size_t blocks = 0;
};

struct HolmComparison {
    std::size_t method_index = 0;  // index into the rank table
    double z = 0.0;
    double p = 0.0;          // two-sided normal p-value
    double threshold = 0.0;  // alpha / (m - i + 1) in sorted order
    bool reject = false;
};

// Frechet distance between Gaussian fits of the two sample sets
// (rows = samples). Covariances get a 1e-6 ridge.
double gaussian_frechet(const Tensor& a, const Tensor& b);

// Sliced squared 2-Wasserstein: squared 1-D transport cost averaged over
// random unit projections, scaled by the dimension so that point masses and
// isotropic Gaussian pairs match the unprojected squared distance.
double sliced_w2(const Tensor& a, const Tensor& b, std::size_t n_projections,
                 RngStream& rng);

// Exact squared 1-D W2 between two empirical distributions.
double wasserstein2_1d(std::vector<double> a, std::vector<double> b);

double psnr(const Latent& a, const Latent& b, double peak);

// Mean local SSIM over sliding windows (stride 1) of two images given as
// row-major height-by-width grids.
double ssim(const Latent& a, const Latent& b, std::size_t height,
            std::size_t width, std::size_t window, double peak);

std::pair<double, double> knn_precision_recall(const Tensor& real,
                                               const Tensor& gen,
                                               std::size_t k);

// Friedman chi-square statistic and its upper-tail p-value.
std::pair<double, double> friedman(const RankTable& ranks);

// Step-down Holm comparisons of every method against the control,
// sorted by descending |z|.
std::vector<HolmComparison> holm(const RankTable& ranks,
                                 std::size_t control_index, double alpha);

// Per-path standard deviation over the last ceil(tail_fraction * T) rows of
// a membership trace (rows = reverse steps from t = T down to 1).
std::vector<double> membership_stability(
    const std::vector<std::vector<double>>& trace, double tail_fraction);

}  // namespace dfs
