#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfs/codec.hpp"
#include "dfs/condition.hpp"
#include "dfs/dataset.hpp"
#include "dfs/denoiser.hpp"
#include "dfs/fuzzification.hpp"
#include "dfs/rulebase.hpp"

namespace dfs {

enum class WeightingMode { GateOnly, Verbatim, Renormalized };
enum class PathMode { PerPath, Shared };
enum class ReverseStepMode { ExactInverse, DdpmPosterior };

// Inference-engine ablations. Training is the same for full/dfs-i/dfs-is
// (the loss always uses normalized memberships); dfs-i drops cross-path
// normalization at generation (raw memberships logged, the final fusion is
// re-normalized), dfs-is runs only the chain with the highest membership at
// t = T, and dfs-isl additionally forces the identity codec so diffusion
// happens in sample space.
enum class AblationMode { Full, DfsI, DfsIs, DfsIsl };

struct CodecConfig {
    enum class Mode { Identity, Linear };
    Mode mode = Mode::Identity;
    std::size_t latent_dim = 0;  // 0 means sample dimension
    std::size_t epochs = 200;
    bool per_label = false;  // one codec per label group when true
};

struct EngineConfig {
    std::size_t paths = 3;
    std::size_t steps = 1000;
    double alpha = 0.5;
    WeightingMode weighting = WeightingMode::GateOnly;
    PathMode path_mode = PathMode::PerPath;
    ReverseStepMode reverse_step = ReverseStepMode::ExactInverse;
    TrajectoryMode trajectory = TrajectoryMode::Mean;
    AblationMode ablation = AblationMode::Full;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    std::size_t hidden_width = 128;
    std::size_t hidden_layers = 2;
    std::size_t time_dim = 16;
    std::size_t cond_dim = 8;
    double lr = 1e-3;
    std::size_t batch = 64;
    std::size_t epochs = 30;
    std::uint64_t seed = 1;
    std::size_t gen_n = 600;
    CodecConfig codec;
};

struct MembershipVector {
    std::vector<double> raw;
    std::vector<double> normalized;
};

// One row per reverse step, ordered t = T down to 1. Rows hold the
// memberships used at that step (normalized in full mode, raw in dfs-i).
struct MembershipTrace {
    std::vector<std::vector<double>> rows;
};

struct Checkpoint {
    int version = 1;
    EngineConfig config;
    CodecRegistry registry;
    std::vector<int> labels;  // sorted distinct training labels
    std::vector<std::size_t> medoid_ids;
    std::vector<RepresentativeTrajectory> trajectories;
    NoiseSchedule schedule;
    std::vector<DenoiserParams> denoisers;  // one per path, or one shared
    std::vector<double> loss_history;       // per-epoch training loss

    std::size_t latent_dim() const {
        return trajectories.empty() ? 0 : trajectories.front().d.size();
    }
};

// One reverse-diffusion path: its antecedent trajectory, denoiser, and the
// shared schedule.
struct RuleChain {
    std::size_t path_id = 0;
    const RepresentativeTrajectory* trajectory = nullptr;
    const DenoiserParams* denoiser = nullptr;
    const NoiseSchedule* schedule = nullptr;
};

RuleChain chain_view(const Checkpoint& ckpt, std::size_t k);

struct TrainingDiverged : std::runtime_error {
    TrainingDiverged(std::size_t epoch_, std::size_t step_)
        : std::runtime_error("training diverged at epoch " +
                             std::to_string(epoch_) + ", step " +
                             std::to_string(step_)),
          epoch(epoch_),
          step(step_) {}
    std::size_t epoch;
    std::size_t step;
};

// raw -> raw / sum(raw); an all-zero vector normalizes to uniform.
MembershipVector normalize_memberships(const std::vector<double>& raw);

Latent weight_consequent(const Latent& state, double mu, WeightingMode mode,
                         std::size_t paths);

// Membership-weighted combination of the K path outputs (weights sum to 1).
Latent fuse(const std::vector<Latent>& path_outputs,
            const std::vector<double>& mu_normalized);

using MembershipObserver = std::function<void(const MembershipVector&)>;

Checkpoint train(const SampleSet& dataset, const EngineConfig& config,
                 const MembershipObserver& observer = nullptr);

struct GenerationResult {
    Tensor samples;  // n x sample_dim, decoded
    std::vector<MembershipTrace> traces;
    // Final per-path latent states with the accumulated consequent weights
    // applied, and the weight products themselves (identity in gate-only).
    std::vector<std::vector<Latent>> final_path_states;  // [sample][path]
    std::vector<std::vector<double>> weight_products;    // [sample][path]
};

GenerationResult generate(const Checkpoint& ckpt, int cond_label,
                          std::size_t n, RngStream& rng,
                          const MembershipObserver& observer = nullptr);

struct AblationReport {
    AblationMode mode = AblationMode::Full;
    double frechet = 0.0;
    double sliced_w2 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::vector<MembershipTrace> traces;
};

AblationReport run_ablation(const SampleSet& train_set,
                            const SampleSet& holdout, EngineConfig config,
                            AblationMode mode);

std::string to_string(WeightingMode m);
std::string to_string(PathMode m);
std::string to_string(ReverseStepMode m);
std::string to_string(TrajectoryMode m);
std::string to_string(AblationMode m);

}  // namespace dfs
