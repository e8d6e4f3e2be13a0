#include "dfs/codec.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dfs/denoiser.hpp"
#include "dfs/numerics.hpp"

namespace dfs {

namespace {

std::size_t exact_medoid_impl(const std::vector<Latent>& data) {
    std::size_t best = 0;
    double best_total = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < data.size(); ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < data.size(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < data[i].size(); ++k) {
                const double d = data[i][k] - data[j][k];
                s += d * d;
            }
            total += std::sqrt(s);
        }
        if (total < best_total) {
            best_total = total;
            best = i;
        }
    }
    return best;
}

void matvec(const std::vector<double>& w, const std::vector<double>& b,
            std::size_t rows, std::size_t cols, const Latent& x, Latent& out) {
    out.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double s = b[r];
        const double* wr = w.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) s += wr[c] * x[c];
        out[r] = s;
    }
}

}  // namespace

std::size_t medoid_index(const std::vector<Latent>& data) {
    if (data.empty()) throw std::invalid_argument("medoid_index: empty dataset");
    return exact_medoid_impl(data);
}

Codec identity_codec(std::size_t dim, const Latent& representative,
                     const Condition& representative_condition) {
    Codec c;
    c.sample_dim = dim;
    c.latent_dim = dim;
    c.enc_w.assign(dim * dim, 0.0);
    c.dec_w.assign(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        c.enc_w[i * dim + i] = 1.0;
        c.dec_w[i * dim + i] = 1.0;
    }
    c.enc_b.assign(dim, 0.0);
    c.dec_b.assign(dim, 0.0);
    c.representative = representative;
    c.representative_condition = representative_condition;
    return c;
}

Codec train_codec(const std::vector<Latent>& dataset, std::size_t latent_dim,
                  std::size_t epochs, RngStream& rng,
                  const Condition& representative_condition) {
    if (dataset.empty())
        throw std::invalid_argument("train_codec: empty dataset");
    const std::size_t sample_dim = dataset.front().size();
    if (latent_dim < 1 || latent_dim > sample_dim)
        throw std::invalid_argument("train_codec: latent_dim outside [1, sample_dim]");

    Codec c;
    c.sample_dim = sample_dim;
    c.latent_dim = latent_dim;
    c.enc_b.assign(latent_dim, 0.0);
    c.dec_b.assign(sample_dim, 0.0);
    c.enc_w.assign(latent_dim * sample_dim, 0.0);
    c.dec_w.assign(sample_dim * latent_dim, 0.0);

    if (latent_dim == sample_dim) {
        for (std::size_t i = 0; i < latent_dim; ++i) {
            c.enc_w[i * sample_dim + i] = 1.0;
            c.dec_w[i * latent_dim + i] = 1.0;
        }
    } else {
        const double scale = 1.0 / std::sqrt(static_cast<double>(sample_dim));
        for (std::size_t r = 0; r < latent_dim; ++r)
            for (std::size_t col = 0; col < sample_dim; ++col)
                c.enc_w[r * sample_dim + col] = scale * rng.next_normal();
        // Tied transpose start for the decoder.
        for (std::size_t r = 0; r < sample_dim; ++r)
            for (std::size_t col = 0; col < latent_dim; ++col)
                c.dec_w[r * latent_dim + col] = c.enc_w[col * sample_dim + r];
    }

    c.representative = dataset[exact_medoid_impl(dataset)];
    c.representative_condition = representative_condition;

    if (epochs == 0) return c;

    // Flat parameter block: enc_w | enc_b | dec_w | dec_b.
    const std::size_t n_enc_w = c.enc_w.size();
    const std::size_t n_enc_b = c.enc_b.size();
    const std::size_t n_dec_w = c.dec_w.size();
    std::vector<double> theta;
    theta.reserve(n_enc_w + n_enc_b + n_dec_w + c.dec_b.size());
    theta.insert(theta.end(), c.enc_w.begin(), c.enc_w.end());
    theta.insert(theta.end(), c.enc_b.begin(), c.enc_b.end());
    theta.insert(theta.end(), c.dec_w.begin(), c.dec_w.end());
    theta.insert(theta.end(), c.dec_b.begin(), c.dec_b.end());

    OptimizerState opt;
    const double lr = 1e-2;
    const std::size_t batch_size = 32;
    const std::size_t n = dataset.size();
    RngStream shuffle_rng = rng.fork("codec-shuffle");

    std::vector<double> grads(theta.size());
    Latent z(latent_dim), recon(sample_dim), dz(latent_dim);
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        const std::vector<std::size_t> order = shuffle_rng.permutation(n);
        for (std::size_t start = 0; start < n; start += batch_size) {
            const std::size_t stop = std::min(start + batch_size, n);
            std::fill(grads.begin(), grads.end(), 0.0);
            const double inv = 1.0 / static_cast<double>(stop - start);
            const double* ew = theta.data();
            const double* eb = ew + n_enc_w;
            const double* dw = eb + n_enc_b;
            const double* db = dw + n_dec_w;
            double* g_ew = grads.data();
            double* g_eb = g_ew + n_enc_w;
            double* g_dw = g_eb + n_enc_b;
            double* g_db = g_dw + n_dec_w;

            for (std::size_t bi = start; bi < stop; ++bi) {
                const Latent& x = dataset[order[bi]];
                for (std::size_t r = 0; r < latent_dim; ++r) {
                    double s = eb[r];
                    const double* row = ew + r * sample_dim;
                    for (std::size_t cc = 0; cc < sample_dim; ++cc) s += row[cc] * x[cc];
                    z[r] = s;
                }
                for (std::size_t r = 0; r < sample_dim; ++r) {
                    double s = db[r];
                    const double* row = dw + r * latent_dim;
                    for (std::size_t cc = 0; cc < latent_dim; ++cc) s += row[cc] * z[cc];
                    recon[r] = s;
                }
                // d(mse)/d(recon) = 2 (recon - x) / batch
                std::fill(dz.begin(), dz.end(), 0.0);
                for (std::size_t r = 0; r < sample_dim; ++r) {
                    const double dr = 2.0 * inv * (recon[r] - x[r]);
                    double* grow = g_dw + r * latent_dim;
                    const double* row = dw + r * latent_dim;
                    for (std::size_t cc = 0; cc < latent_dim; ++cc) {
                        grow[cc] += dr * z[cc];
                        dz[cc] += dr * row[cc];
                    }
                    g_db[r] += dr;
                }
                for (std::size_t r = 0; r < latent_dim; ++r) {
                    const double dr = dz[r];
                    double* grow = g_ew + r * sample_dim;
                    for (std::size_t cc = 0; cc < sample_dim; ++cc)
                        grow[cc] += dr * x[cc];
                    g_eb[r] += dr;
                }
            }
            adam_step(theta, grads, opt, lr);
        }
    }

    std::copy(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(n_enc_w),
              c.enc_w.begin());
    std::copy(theta.begin() + static_cast<std::ptrdiff_t>(n_enc_w),
              theta.begin() + static_cast<std::ptrdiff_t>(n_enc_w + n_enc_b),
              c.enc_b.begin());
    std::copy(theta.begin() + static_cast<std::ptrdiff_t>(n_enc_w + n_enc_b),
              theta.begin() + static_cast<std::ptrdiff_t>(n_enc_w + n_enc_b + n_dec_w),
              c.dec_w.begin());
    std::copy(theta.begin() + static_cast<std::ptrdiff_t>(n_enc_w + n_enc_b + n_dec_w),
              theta.end(), c.dec_b.begin());
    return c;
}

std::pair<std::size_t, std::vector<double>> select_codec(
    const CodecRegistry& registry, const Latent& x, const Condition& cond,
    const MembershipParams& params) {
    if (registry.codecs.empty())
        throw std::invalid_argument("select_codec: empty registry");
    if (x.size() != registry.sample_dim())
        throw std::invalid_argument("select_codec: sample dimension mismatch");

    std::vector<double> memberships(registry.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < registry.size(); ++i) {
        const Codec& c = registry.codecs[i];
        memberships[i] =
            smc(x, c.representative, cond, c.representative_condition, params);
        if (memberships[i] > memberships[best]) best = i;
    }
    return {best, std::move(memberships)};
}

Latent encode(const Codec& codec, const Latent& x) {
    if (x.size() != codec.sample_dim)
        throw std::invalid_argument("encode: sample dimension mismatch");
    Latent z;
    matvec(codec.enc_w, codec.enc_b, codec.latent_dim, codec.sample_dim, x, z);
    return z;
}

Latent decode(const Codec& codec, const Latent& z) {
    if (z.size() != codec.latent_dim)
        throw std::invalid_argument("decode: latent dimension mismatch");
    Latent x;
    matvec(codec.dec_w, codec.dec_b, codec.sample_dim, codec.latent_dim, z, x);
    return x;
}

}  // namespace dfs
