#include "dfs/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dfs/evaluation.hpp"
#include "dfs/numerics.hpp"

namespace dfs {

namespace {

Condition label_condition(int label, const EngineConfig& config) {
    return make_condition(label, config.cond_dim, config.seed);
}

std::map<int, Condition> condition_table(const std::vector<int>& labels,
                                         const EngineConfig& config) {
    std::map<int, Condition> table;
    for (int l : labels) table.emplace(l, label_condition(l, config));
    return table;
}

CodecRegistry build_registry(const SampleSet& dataset,
                             const EngineConfig& config, RngStream& root,
                             const std::map<int, Condition>& conds) {
    const std::vector<Latent> rows = dataset.rows();
    CodecRegistry registry;

    CodecConfig cc = config.codec;
    if (config.ablation == AblationMode::DfsIsl) cc.mode = CodecConfig::Mode::Identity;

    if (cc.mode == CodecConfig::Mode::Identity) {
        const std::size_t rep = medoid_index(rows);
        registry.codecs.push_back(identity_codec(
            dataset.dim(), rows[rep], conds.at(dataset.labels[rep])));
        return registry;
    }

    const std::size_t latent_dim =
        cc.latent_dim == 0 ? dataset.dim() : cc.latent_dim;
    if (cc.per_label) {
        const std::vector<int> labels = dataset.distinct_labels();
        std::size_t group = 0;
        for (int l : labels) {
            std::vector<Latent> subset;
            for (std::size_t i = 0; i < dataset.size(); ++i)
                if (dataset.labels[i] == l) subset.push_back(rows[i]);
            RngStream codec_rng = root.fork("codec").fork(group++);
            registry.codecs.push_back(
                train_codec(subset, latent_dim, cc.epochs, codec_rng, conds.at(l)));
        }
    } else {
        RngStream codec_rng = root.fork("codec").fork(std::uint64_t{0});
        const std::size_t rep = medoid_index(rows);
        registry.codecs.push_back(train_codec(rows, latent_dim, cc.epochs,
                                              codec_rng,
                                              conds.at(dataset.labels[rep])));
    }
    return registry;
}

// Decoder choice for a generated latent: the prompt condition is the only
// available evidence, so the feature term is neutral (0.5).
std::size_t select_codec_for_condition(const CodecRegistry& registry,
                                       const Condition& cond, double alpha) {
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < registry.size(); ++i) {
        const double semantic = cosine01(
            cond.embedding, registry.codecs[i].representative_condition.embedding);
        const double score = alpha * semantic + (1.0 - alpha) * 0.5;
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

}  // namespace

RuleChain chain_view(const Checkpoint& ckpt, std::size_t k) {
    if (k >= ckpt.trajectories.size())
        throw std::invalid_argument("chain_view: path index out of range");
    RuleChain chain;
    chain.path_id = k;
    chain.trajectory = &ckpt.trajectories[k];
    chain.denoiser = ckpt.config.path_mode == PathMode::PerPath
                         ? &ckpt.denoisers[k]
                         : &ckpt.denoisers[0];
    chain.schedule = &ckpt.schedule;
    return chain;
}

MembershipVector normalize_memberships(const std::vector<double>& raw) {
    MembershipVector mv;
    mv.raw = raw;
    mv.normalized.resize(raw.size());
    double sum = 0.0;
    for (double v : raw) sum += v;
    if (sum < 1e-12) {
        const double u = 1.0 / static_cast<double>(raw.size());
        std::fill(mv.normalized.begin(), mv.normalized.end(), u);
    } else {
        for (std::size_t i = 0; i < raw.size(); ++i)
            mv.normalized[i] = raw[i] / sum;
    }
    return mv;
}

Latent weight_consequent(const Latent& state, double mu, WeightingMode mode,
                         std::size_t paths) {
    switch (mode) {
        case WeightingMode::GateOnly:
            return state;
        case WeightingMode::Verbatim: {
            Latent out(state.size());
            for (std::size_t i = 0; i < state.size(); ++i) out[i] = mu * state[i];
            return out;
        }
        case WeightingMode::Renormalized: {
            const double f = static_cast<double>(paths) * mu;
            Latent out(state.size());
            for (std::size_t i = 0; i < state.size(); ++i) out[i] = f * state[i];
            return out;
        }
    }
    throw std::invalid_argument("weight_consequent: unknown weighting mode");
}

Latent fuse(const std::vector<Latent>& path_outputs,
            const std::vector<double>& mu_normalized) {
    if (path_outputs.empty() || path_outputs.size() != mu_normalized.size())
        throw std::invalid_argument("fuse: path/weight length mismatch");
    Latent out(path_outputs.front().size(), 0.0);
    for (std::size_t k = 0; k < path_outputs.size(); ++k) {
        check_same_shape(out, path_outputs[k], "fuse");
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += mu_normalized[k] * path_outputs[k][i];
    }
    return out;
}

Checkpoint train(const SampleSet& dataset, const EngineConfig& config,
                 const MembershipObserver& observer) {
    if (dataset.size() == 0) throw std::invalid_argument("train: empty dataset");
    if (config.paths < 1 || config.steps < 1)
        throw std::invalid_argument("train: paths and steps must be >= 1");
    if (config.alpha < 0.0 || config.alpha > 1.0)
        throw std::invalid_argument("train: alpha outside [0, 1]");

    RngStream root(config.seed);
    const std::vector<int> labels = dataset.distinct_labels();
    for (int l : labels)
        if (l < 0 || static_cast<std::size_t>(l) >= config.cond_dim)
            throw std::invalid_argument(
                "train: label " + std::to_string(l) +
                " does not fit the condition embedding dimension");
    const std::map<int, Condition> conds = condition_table(labels, config);

    Checkpoint ckpt;
    ckpt.config = config;
    ckpt.labels = labels;
    ckpt.registry = build_registry(dataset, config, root, conds);
    ckpt.schedule = linear_schedule(config.steps, config.beta_start, config.beta_end);

    const MembershipParams mparams{config.alpha};

    // Encode the training set through its per-sample codec choice.
    const std::size_t n = dataset.size();
    std::vector<Latent> latents(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Latent x = dataset.samples.row(i);
        const Condition& cond = conds.at(dataset.labels[i]);
        const std::size_t idx =
            select_codec(ckpt.registry, x, cond, mparams).first;
        latents[i] = encode(ckpt.registry.codecs[idx], x);
    }
    const std::size_t z_dim = latents.front().size();

    RngStream medoid_rng = root.fork("kmedoids");
    ckpt.medoid_ids = kmedoids(latents, config.paths, medoid_rng);
    ckpt.trajectories.reserve(config.paths);
    for (std::size_t k = 0; k < config.paths; ++k) {
        const std::size_t id = ckpt.medoid_ids[k];
        ckpt.trajectories.push_back(
            build_trajectory(latents[id], ckpt.schedule, config.trajectory, root,
                             k, dataset.labels[id]));
    }
    std::vector<Condition> medoid_conds;
    for (std::size_t k = 0; k < config.paths; ++k)
        medoid_conds.push_back(conds.at(ckpt.trajectories[k].condition_label));

    DenoiserArch arch;
    arch.latent_dim = z_dim;
    arch.time_dim = config.time_dim;
    arch.cond_dim = config.cond_dim;
    arch.hidden_width = config.hidden_width;
    arch.hidden_layers = config.hidden_layers;

    const std::size_t n_denoisers =
        config.path_mode == PathMode::PerPath ? config.paths : 1;
    for (std::size_t d = 0; d < n_denoisers; ++d) {
        RngStream init_rng = root.fork("init").fork(d);
        ckpt.denoisers.push_back(init_denoiser(arch, init_rng));
    }
    std::vector<OptimizerState> opt(n_denoisers);

    const std::size_t batch_size = std::max<std::size_t>(1, config.batch);
    std::vector<std::vector<NoiseExample>> batches(n_denoisers);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        RngStream epoch_rng = root.fork("epoch").fork(epoch);
        const std::vector<std::size_t> order = epoch_rng.permutation(n);
        double epoch_loss = 0.0;
        std::size_t batch_index = 0;

        for (std::size_t start = 0; start < n; start += batch_size, ++batch_index) {
            const std::size_t stop = std::min(start + batch_size, n);
            const double inv_b = 1.0 / static_cast<double>(stop - start);
            for (auto& b : batches) b.clear();

            for (std::size_t bi = start; bi < stop; ++bi) {
                const std::size_t i = order[bi];
                const std::size_t t =
                    static_cast<std::size_t>(epoch_rng.next_int(1, config.steps));

                Latent z_t;
                Latent target;
                if (config.weighting == WeightingMode::Verbatim) {
                    // Literal forward chain; the last injected noise is the
                    // prediction target.
                    Latent z = latents[i];
                    Latent eps;
                    for (std::size_t s = 1; s <= t; ++s) {
                        eps = normal_vector(epoch_rng, z_dim);
                        z = forward_gen(z, s, ckpt.schedule, eps);
                    }
                    z_t = std::move(z);
                    target = std::move(eps);
                } else {
                    const Latent eps = normal_vector(epoch_rng, z_dim);
                    z_t = forward_marginal(latents[i], t, ckpt.schedule, eps);
                    target = eps;
                }

                const Condition& cond = conds.at(dataset.labels[i]);
                std::vector<double> raw(config.paths);
                for (std::size_t k = 0; k < config.paths; ++k)
                    raw[k] = smc(z_t, ckpt.trajectories[k].at(t), cond,
                                 medoid_conds[k], mparams);
                const MembershipVector mv = normalize_memberships(raw);
                if (observer) observer(mv);

                if (config.path_mode == PathMode::PerPath) {
                    for (std::size_t k = 0; k < config.paths; ++k) {
                        NoiseExample ex;
                        ex.z_t = z_t;
                        ex.eps = target;
                        ex.t = t;
                        ex.cond = cond;
                        ex.weight = mv.normalized[k] * inv_b;
                        batches[k].push_back(std::move(ex));
                    }
                } else {
                    // The normalized weights sum to one, so the shared
                    // denoiser sees the plain per-sample loss.
                    NoiseExample ex;
                    ex.z_t = std::move(z_t);
                    ex.eps = std::move(target);
                    ex.t = t;
                    ex.cond = cond;
                    ex.weight = inv_b;
                    batches[0].push_back(std::move(ex));
                }
            }

            for (std::size_t d = 0; d < n_denoisers; ++d) {
                auto [loss, grads] =
                    loss_and_grads(ckpt.denoisers[d], batches[d], config.steps);
                if (!std::isfinite(loss)) throw TrainingDiverged(epoch, batch_index);
                adam_step(ckpt.denoisers[d], grads, opt[d], config.lr);
                epoch_loss += loss;
            }
        }
        ckpt.loss_history.push_back(epoch_loss);
    }
    return ckpt;
}

GenerationResult generate(const Checkpoint& ckpt, int cond_label,
                          std::size_t n, RngStream& rng,
                          const MembershipObserver& observer) {
    const EngineConfig& config = ckpt.config;
    if (std::find(ckpt.labels.begin(), ckpt.labels.end(), cond_label) ==
        ckpt.labels.end())
        throw std::invalid_argument("generate: unknown condition label " +
                                    std::to_string(cond_label));

    const Condition cond = label_condition(cond_label, config);
    const MembershipParams mparams{config.alpha};
    const std::size_t paths = config.paths;
    const std::size_t z_dim = ckpt.latent_dim();
    const std::size_t t_max = config.steps;
    const bool hard_select = config.ablation == AblationMode::DfsIs ||
                             config.ablation == AblationMode::DfsIsl;

    std::vector<Condition> medoid_conds;
    for (std::size_t k = 0; k < paths; ++k)
        medoid_conds.push_back(
            label_condition(ckpt.trajectories[k].condition_label, config));

    const std::size_t codec_idx =
        select_codec_for_condition(ckpt.registry, cond, config.alpha);
    const Codec& codec = ckpt.registry.codecs[codec_idx];

    GenerationResult result;
    result.samples = Tensor::zeros({n, codec.sample_dim});
    result.traces.resize(n);
    result.final_path_states.resize(n);
    result.weight_products.resize(n);

    for (std::size_t s = 0; s < n; ++s) {
        RngStream sample_rng = rng.fork("sample").fork(s);
        const Latent eps = normal_vector(sample_rng, z_dim);

        std::vector<Latent> states(paths, eps);
        std::vector<double> products(paths, 1.0);
        MembershipTrace& trace = result.traces[s];
        trace.rows.reserve(t_max);

        // Hard path selection happens once, on the initial noise state.
        std::size_t selected = 0;
        if (hard_select) {
            std::vector<double> raw(paths);
            for (std::size_t k = 0; k < paths; ++k)
                raw[k] = smc(eps, ckpt.trajectories[k].at(t_max), cond,
                             medoid_conds[k], mparams);
            for (std::size_t k = 1; k < paths; ++k)
                if (raw[k] > raw[selected]) selected = k;
        }

        for (std::size_t t = t_max; t >= 1; --t) {
            std::vector<double> raw(paths);
            for (std::size_t k = 0; k < paths; ++k)
                raw[k] = smc(states[k], ckpt.trajectories[k].at(t), cond,
                             medoid_conds[k], mparams);
            const MembershipVector mv = normalize_memberships(raw);
            if (observer) observer(mv);

            if (hard_select) {
                std::vector<double> row(paths, 0.0);
                row[selected] = 1.0;
                trace.rows.push_back(std::move(row));
            } else if (config.ablation == AblationMode::DfsI) {
                trace.rows.push_back(mv.raw);
            } else {
                trace.rows.push_back(mv.normalized);
            }

            for (std::size_t k = 0; k < paths; ++k) {
                if (hard_select && k != selected) continue;
                const DenoiserParams& params =
                    config.path_mode == PathMode::PerPath ? ckpt.denoisers[k]
                                                          : ckpt.denoisers[0];
                const Latent eps_hat =
                    predict_noise(params, states[k], t, t_max, cond);
                states[k] =
                    config.reverse_step == ReverseStepMode::ExactInverse
                        ? backward_gen(states[k], t, ckpt.schedule, eps_hat)
                        : backward_posterior(states[k], t, ckpt.schedule, eps_hat);
                if (config.ablation == AblationMode::Full) {
                    if (config.weighting == WeightingMode::Verbatim)
                        products[k] *= mv.normalized[k];
                    else if (config.weighting == WeightingMode::Renormalized)
                        products[k] *=
                            static_cast<double>(paths) * mv.normalized[k];
                }
            }
        }

        // Consequent weights are applied at readout so the accumulated
        // product is an exact factor on each path's final state.
        std::vector<Latent> outputs(paths);
        for (std::size_t k = 0; k < paths; ++k) {
            outputs[k] = states[k];
            if (products[k] != 1.0)
                for (double& v : outputs[k]) v *= products[k];
        }

        Latent fused;
        if (hard_select) {
            fused = outputs[selected];
        } else {
            std::vector<double> final_raw(paths);
            for (std::size_t k = 0; k < paths; ++k)
                final_raw[k] = smc(states[k], ckpt.trajectories[k].at(0), cond,
                                   medoid_conds[k], mparams);
            const MembershipVector final_mv = normalize_memberships(final_raw);
            if (observer) observer(final_mv);
            fused = fuse(outputs, final_mv.normalized);
        }

        const Latent decoded = decode(codec, fused);
        for (std::size_t c = 0; c < decoded.size(); ++c)
            result.samples.at(s, c) = decoded[c];
        result.final_path_states[s] = std::move(outputs);
        result.weight_products[s] = std::move(products);
    }
    return result;
}

AblationReport run_ablation(const SampleSet& train_set,
                            const SampleSet& holdout, EngineConfig config,
                            AblationMode mode) {
    config.ablation = mode;
    if (mode == AblationMode::DfsIsl) config.codec.mode = CodecConfig::Mode::Identity;

    const Checkpoint ckpt = train(train_set, config);

    const std::vector<int>& labels = ckpt.labels;
    const std::size_t per_label =
        std::max<std::size_t>(1, config.gen_n / labels.size());

    AblationReport report;
    report.mode = mode;

    std::vector<double> all;
    std::size_t total = 0;
    RngStream gen_root(config.seed, "generation");
    for (std::size_t li = 0; li < labels.size(); ++li) {
        RngStream label_rng = gen_root.fork(li);
        GenerationResult gen =
            generate(ckpt, labels[li], per_label, label_rng);
        all.insert(all.end(), gen.samples.data.begin(), gen.samples.data.end());
        total += gen.samples.rows();
        for (auto& tr : gen.traces) report.traces.push_back(std::move(tr));
    }
    Tensor generated({total, train_set.dim()}, std::move(all));

    report.frechet = gaussian_frechet(holdout.samples, generated);
    RngStream sw2_rng(config.seed, "sliced-w2");
    report.sliced_w2 = sliced_w2(holdout.samples, generated, 128, sw2_rng);
    const std::size_t k = 3;
    if (holdout.size() > k && generated.rows() > k) {
        auto [p, r] = knn_precision_recall(holdout.samples, generated, k);
        report.precision = p;
        report.recall = r;
    }
    return report;
}

std::string to_string(WeightingMode m) {
    switch (m) {
        case WeightingMode::GateOnly: return "gate-only";
        case WeightingMode::Verbatim: return "verbatim";
        case WeightingMode::Renormalized: return "renormalized";
    }
    return "?";
}

std::string to_string(PathMode m) {
    switch (m) {
        case PathMode::PerPath: return "per-path";
        case PathMode::Shared: return "shared";
    }
    return "?";
}

std::string to_string(ReverseStepMode m) {
    switch (m) {
        case ReverseStepMode::ExactInverse: return "exact-inverse";
        case ReverseStepMode::DdpmPosterior: return "ddpm-posterior";
    }
    return "?";
}

std::string to_string(TrajectoryMode m) {
    switch (m) {
        case TrajectoryMode::Mean: return "mean";
        case TrajectoryMode::Sampled: return "sampled";
    }
    return "?";
}

std::string to_string(AblationMode m) {
    switch (m) {
        case AblationMode::Full: return "full";
        case AblationMode::DfsI: return "dfs-i";
        case AblationMode::DfsIs: return "dfs-is";
        case AblationMode::DfsIsl: return "dfs-isl";
    }
    return "?";
}

}  // namespace dfs
