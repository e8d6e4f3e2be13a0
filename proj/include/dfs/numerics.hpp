#pragma once

#include <vector>

#include "dfs/rng.hpp"
#include "dfs/tensor.hpp"

namespace dfs {

// i.i.d. standard-normal tensor; throws on empty or zero-sized shapes.
Tensor standard_normal(RngStream& rng, const std::vector<std::size_t>& shape);
Latent normal_vector(RngStream& rng, std::size_t dim);

double dot(const Latent& a, const Latent& b);
double norm(const Latent& a);

// Cosine similarity mapped to [0, 1]: (1 + cos ang(a,b)) / 2.
// Vectors with norm below 1e-12 compare as 0.5 against anything.
double cosine01(const Latent& a, const Latent& b);

// Symmetric PSD square root: returns S with S*S ~= M. M must be symmetric
// and have eigenvalues >= -1e-10 (small negatives are clamped to zero).
// Matrices are n*n row-major.
std::vector<double> sym_psd_sqrt(const std::vector<double>& m, std::size_t n);

// Upper-tail chi-square survival function Q(df/2, x/2).
double chi2_sf(double x, unsigned df);

}  // namespace dfs
