#include "dfs/condition.hpp"

#include <cmath>
#include <stdexcept>

#include "dfs/numerics.hpp"
#include "dfs/rng.hpp"

namespace dfs {

namespace {

// Orthonormal dim-by-dim basis via Gram-Schmidt on seeded Gaussian columns.
std::vector<Latent> rotation_columns(std::size_t dim, std::uint64_t seed) {
    RngStream rng(seed, "cond-embed");
    std::vector<Latent> cols;
    cols.reserve(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        Latent v = normal_vector(rng, dim);
        for (const Latent& u : cols) {
            const double p = dot(v, u);
            for (std::size_t i = 0; i < dim; ++i) v[i] -= p * u[i];
        }
        double n = norm(v);
        // Re-draw on a (measure-zero) degenerate column.
        while (n < 1e-9) {
            v = normal_vector(rng, dim);
            for (const Latent& u : cols) {
                const double p = dot(v, u);
                for (std::size_t i = 0; i < dim; ++i) v[i] -= p * u[i];
            }
            n = norm(v);
        }
        for (double& x : v) x /= n;
        cols.push_back(std::move(v));
    }
    return cols;
}

}  // namespace

Condition make_condition(int label, std::size_t dim, std::uint64_t seed) {
    if (label < 0)
        throw std::invalid_argument("make_condition: negative label");
    if (static_cast<std::size_t>(label) >= dim)
        throw std::invalid_argument(
            "make_condition: label exceeds condition embedding dimension");
    Condition c;
    c.label = label;
    c.embedding = rotation_columns(dim, seed)[static_cast<std::size_t>(label)];
    return c;
}

}  // namespace dfs
