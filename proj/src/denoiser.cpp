#include "dfs/denoiser.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dfs {

namespace {

double silu(double x) { return x / (1.0 + std::exp(-x)); }

double silu_grad(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

std::size_t layer_size(const DenoiserArch& a, std::size_t l) {
    return a.layer_out(l) * a.layer_in(l) + a.layer_out(l);
}

Latent build_input(const DenoiserArch& arch, const Latent& z, std::size_t t,
                   std::size_t total_steps, const Condition& cond) {
    if (z.size() != arch.latent_dim)
        throw std::invalid_argument("predict_noise: latent dimension mismatch");
    if (cond.embedding.size() != arch.cond_dim)
        throw std::invalid_argument("predict_noise: condition dimension mismatch");
    Latent in;
    in.reserve(arch.input_dim());
    in.insert(in.end(), z.begin(), z.end());
    const Latent te = time_embedding(t, total_steps, arch.time_dim);
    in.insert(in.end(), te.begin(), te.end());
    in.insert(in.end(), cond.embedding.begin(), cond.embedding.end());
    return in;
}

struct ForwardCache {
    // Per layer: pre-activation and activation (input counts as act[0]).
    std::vector<Latent> pre;
    std::vector<Latent> act;
};

Latent forward_pass(const DenoiserParams& p, const Latent& input,
                    ForwardCache* cache) {
    const DenoiserArch& a = p.arch;
    Latent cur = input;
    if (cache) {
        cache->pre.resize(a.num_layers());
        cache->act.resize(a.num_layers() + 1);
        cache->act[0] = cur;
    }
    for (std::size_t l = 0; l < a.num_layers(); ++l) {
        const std::size_t in = a.layer_in(l);
        const std::size_t out = a.layer_out(l);
        const double* W = p.values.data() + p.layer_offset(l);
        const double* b = W + out * in;
        Latent pre(out);
        for (std::size_t r = 0; r < out; ++r) {
            double s = b[r];
            const double* wr = W + r * in;
            for (std::size_t c = 0; c < in; ++c) s += wr[c] * cur[c];
            pre[r] = s;
        }
        const bool last = l == a.num_layers() - 1;
        Latent act(out);
        for (std::size_t r = 0; r < out; ++r)
            act[r] = last ? pre[r] : silu(pre[r]);
        if (cache) {
            cache->pre[l] = pre;
            cache->act[l + 1] = act;
        }
        cur = std::move(act);
    }
    return cur;
}

}  // namespace

std::size_t DenoiserParams::layer_offset(std::size_t l) const {
    std::size_t off = 0;
    for (std::size_t i = 0; i < l; ++i) off += layer_size(arch, i);
    return off;
}

std::size_t param_count(const DenoiserArch& arch) {
    std::size_t n = 0;
    for (std::size_t l = 0; l < arch.num_layers(); ++l) n += layer_size(arch, l);
    return n;
}

std::size_t matched_single_path_width(const DenoiserArch& arch, std::size_t k) {
    const std::size_t target = k * param_count(arch);
    std::size_t best_w = arch.hidden_width;
    double best_err = 1e300;
    for (std::size_t w = 1; w <= 16 * arch.hidden_width * k + 64; ++w) {
        DenoiserArch cand = arch;
        cand.hidden_width = w;
        const double err =
            std::abs(static_cast<double>(param_count(cand)) -
                     static_cast<double>(target)) /
            static_cast<double>(target);
        if (err < best_err) {
            best_err = err;
            best_w = w;
        }
    }
    if (best_err > 0.02)
        throw std::invalid_argument(
            "matched_single_path_width: no width within 2% of target");
    return best_w;
}

Latent time_embedding(std::size_t t, std::size_t total_steps, std::size_t dim) {
    if (dim == 0 || dim % 2 != 0)
        throw std::invalid_argument("time_embedding: dim must be even and positive");
    if (t < 1 || t > total_steps)
        throw std::invalid_argument("time_embedding: step out of range");
    const std::size_t half = dim / 2;
    Latent out(dim);
    for (std::size_t i = 0; i < half; ++i) {
        const double freq =
            std::exp(-std::log(10000.0) * static_cast<double>(i) /
                     static_cast<double>(half));
        const double x = static_cast<double>(t) * freq;
        out[2 * i] = std::sin(x);
        out[2 * i + 1] = std::cos(x);
    }
    return out;
}

DenoiserParams init_denoiser(const DenoiserArch& arch, RngStream& rng) {
    DenoiserParams p;
    p.arch = arch;
    p.values.assign(param_count(arch), 0.0);
    for (std::size_t l = 0; l < arch.num_layers(); ++l) {
        const std::size_t in = arch.layer_in(l);
        const std::size_t out = arch.layer_out(l);
        double* W = p.values.data() + p.layer_offset(l);
        const double scale = 1.0 / std::sqrt(static_cast<double>(in));
        for (std::size_t i = 0; i < out * in; ++i)
            W[i] = scale * rng.next_normal();
        // Biases stay zero.
    }
    return p;
}

Latent predict_noise(const DenoiserParams& params, const Latent& z,
                     std::size_t t, std::size_t total_steps,
                     const Condition& cond) {
    const Latent input = build_input(params.arch, z, t, total_steps, cond);
    return forward_pass(params, input, nullptr);
}

std::pair<double, std::vector<double>> loss_and_grads(
    const DenoiserParams& params, const std::vector<NoiseExample>& batch,
    std::size_t total_steps) {
    const DenoiserArch& a = params.arch;
    double loss = 0.0;
    std::vector<double> grads(params.values.size(), 0.0);

    for (const NoiseExample& ex : batch) {
        if (ex.weight < 0.0)
            throw std::invalid_argument("loss_and_grads: negative weight");
        if (ex.eps.size() != a.latent_dim)
            throw std::invalid_argument("loss_and_grads: target dimension mismatch");
        const Latent input = build_input(a, ex.z_t, ex.t, total_steps, ex.cond);
        ForwardCache cache;
        const Latent out = forward_pass(params, input, &cache);

        Latent delta(a.latent_dim);
        for (std::size_t i = 0; i < a.latent_dim; ++i) {
            const double r = out[i] - ex.eps[i];
            loss += ex.weight * r * r;
            delta[i] = 2.0 * ex.weight * r;
        }

        // Backward pass, output layer (linear) first.
        for (std::size_t li = a.num_layers(); li-- > 0;) {
            const std::size_t in = a.layer_in(li);
            const std::size_t out_dim = a.layer_out(li);
            const bool last = li == a.num_layers() - 1;
            Latent dpre(out_dim);
            for (std::size_t r = 0; r < out_dim; ++r)
                dpre[r] = last ? delta[r] : delta[r] * silu_grad(cache.pre[li][r]);

            double* gW = grads.data() + params.layer_offset(li);
            double* gb = gW + out_dim * in;
            const Latent& prev = cache.act[li];
            for (std::size_t r = 0; r < out_dim; ++r) {
                const double d = dpre[r];
                double* row = gW + r * in;
                for (std::size_t c = 0; c < in; ++c) row[c] += d * prev[c];
                gb[r] += d;
            }

            if (li > 0) {
                const double* W = params.values.data() + params.layer_offset(li);
                Latent next(in, 0.0);
                for (std::size_t r = 0; r < out_dim; ++r) {
                    const double d = dpre[r];
                    const double* row = W + r * in;
                    for (std::size_t c = 0; c < in; ++c) next[c] += d * row[c];
                }
                delta = std::move(next);
            }
        }
    }
    return {loss, std::move(grads)};
}

void adam_step(std::vector<double>& values, const std::vector<double>& grads,
               OptimizerState& state, double lr) {
    if (grads.size() != values.size())
        throw std::invalid_argument("adam_step: gradient size mismatch");
    if (state.m.empty()) {
        state.m.assign(values.size(), 0.0);
        state.v.assign(values.size(), 0.0);
    }
    if (state.m.size() != values.size())
        throw std::invalid_argument("adam_step: state size mismatch");

    state.step += 1;
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double g = grads[i];
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
        const double mhat = state.m[i] / c1;
        const double vhat = state.v[i] / c2;
        values[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

void adam_step(DenoiserParams& params, const std::vector<double>& grads,
               OptimizerState& state, double lr) {
    adam_step(params.values, grads, state, lr);
}

double finite_diff_check(const DenoiserParams& params,
                         const std::vector<NoiseExample>& batch,
                         std::size_t total_steps, std::size_t n_coords,
                         RngStream& rng) {
    if (n_coords < 1)
        throw std::invalid_argument("finite_diff_check: n_coords must be >= 1");
    if (params.values.empty()) return 0.0;

    const auto [loss, grads] = loss_and_grads(params, batch, total_steps);
    (void)loss;
    DenoiserParams probe = params;
    const double h = 1e-5;
    double max_rel = 0.0;
    for (std::size_t c = 0; c < n_coords; ++c) {
        const std::size_t i = static_cast<std::size_t>(
            rng.next_int(0, params.values.size() - 1));
        const double saved = probe.values[i];
        probe.values[i] = saved + h;
        const double lp = loss_and_grads(probe, batch, total_steps).first;
        probe.values[i] = saved - h;
        const double lm = loss_and_grads(probe, batch, total_steps).first;
        probe.values[i] = saved;
        const double numeric = (lp - lm) / (2.0 * h);
        const double denom = std::max({std::abs(numeric), std::abs(grads[i]), 1e-8});
        max_rel = std::max(max_rel, std::abs(numeric - grads[i]) / denom);
    }
    return max_rel;
}

}  // namespace dfs
