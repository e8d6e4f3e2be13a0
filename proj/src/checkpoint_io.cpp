#include "dfs/checkpoint_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dfs/io_util.hpp"

namespace dfs {

namespace {

using nlohmann::json;

json config_to_json(const EngineConfig& e) {
    json j;
    j["paths"] = e.paths;
    j["steps"] = e.steps;
    j["alpha"] = e.alpha;
    j["weighting"] = to_string(e.weighting);
    j["path_mode"] = to_string(e.path_mode);
    j["reverse_step"] = to_string(e.reverse_step);
    j["trajectory"] = to_string(e.trajectory);
    j["ablation"] = to_string(e.ablation);
    j["beta_start"] = e.beta_start;
    j["beta_end"] = e.beta_end;
    j["hidden_width"] = e.hidden_width;
    j["hidden_layers"] = e.hidden_layers;
    j["time_dim"] = e.time_dim;
    j["cond_dim"] = e.cond_dim;
    j["lr"] = e.lr;
    j["batch"] = e.batch;
    j["epochs"] = e.epochs;
    j["seed"] = e.seed;
    j["gen_n"] = e.gen_n;
    j["codec"] = {
        {"mode", e.codec.mode == CodecConfig::Mode::Identity ? "identity" : "linear"},
        {"latent_dim", e.codec.latent_dim},
        {"epochs", e.codec.epochs},
        {"per_label", e.codec.per_label},
    };
    return j;
}

EngineConfig config_from_json(const json& j) {
    EngineConfig e;
    e.paths = j.at("paths").get<std::size_t>();
    e.steps = j.at("steps").get<std::size_t>();
    e.alpha = j.at("alpha").get<double>();
    const std::string w = j.at("weighting").get<std::string>();
    e.weighting = w == "gate-only"  ? WeightingMode::GateOnly
                  : w == "verbatim" ? WeightingMode::Verbatim
                                    : WeightingMode::Renormalized;
    e.path_mode = j.at("path_mode").get<std::string>() == "per-path"
                      ? PathMode::PerPath
                      : PathMode::Shared;
    e.reverse_step = j.at("reverse_step").get<std::string>() == "exact-inverse"
                         ? ReverseStepMode::ExactInverse
                         : ReverseStepMode::DdpmPosterior;
    e.trajectory = j.at("trajectory").get<std::string>() == "mean"
                       ? TrajectoryMode::Mean
                       : TrajectoryMode::Sampled;
    const std::string a = j.at("ablation").get<std::string>();
    e.ablation = a == "full"     ? AblationMode::Full
                 : a == "dfs-i"  ? AblationMode::DfsI
                 : a == "dfs-is" ? AblationMode::DfsIs
                                 : AblationMode::DfsIsl;
    e.beta_start = j.at("beta_start").get<double>();
    e.beta_end = j.at("beta_end").get<double>();
    e.hidden_width = j.at("hidden_width").get<std::size_t>();
    e.hidden_layers = j.at("hidden_layers").get<std::size_t>();
    e.time_dim = j.at("time_dim").get<std::size_t>();
    e.cond_dim = j.at("cond_dim").get<std::size_t>();
    e.lr = j.at("lr").get<double>();
    e.batch = j.at("batch").get<std::size_t>();
    e.epochs = j.at("epochs").get<std::size_t>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.gen_n = j.at("gen_n").get<std::size_t>();
    const json& c = j.at("codec");
    e.codec.mode = c.at("mode").get<std::string>() == "identity"
                       ? CodecConfig::Mode::Identity
                       : CodecConfig::Mode::Linear;
    e.codec.latent_dim = c.at("latent_dim").get<std::size_t>();
    e.codec.epochs = c.at("epochs").get<std::size_t>();
    e.codec.per_label = c.at("per_label").get<bool>();
    return e;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
    json j;
    j["version"] = ckpt.version;
    j["dtype"] = "f64";
    j["config"] = config_to_json(ckpt.config);
    j["labels"] = ckpt.labels;
    j["medoid_ids"] = ckpt.medoid_ids;
    j["schedule"] = {{"steps", ckpt.schedule.steps},
                     {"beta_start", ckpt.config.beta_start},
                     {"beta_end", ckpt.config.beta_end}};

    json trajs = json::array();
    for (const RepresentativeTrajectory& t : ckpt.trajectories) {
        std::vector<double> flat;
        flat.reserve(t.d_seq.size() * t.d.size());
        for (const Latent& v : t.d_seq) flat.insert(flat.end(), v.begin(), v.end());
        trajs.push_back({{"path_id", t.path_id},
                         {"condition_label", t.condition_label},
                         {"dim", t.d.size()},
                         {"d", base64_f64(t.d)},
                         {"d_seq", base64_f64(flat)}});
    }
    j["trajectories"] = trajs;

    json dens = json::array();
    for (const DenoiserParams& p : ckpt.denoisers) {
        dens.push_back({{"latent_dim", p.arch.latent_dim},
                        {"time_dim", p.arch.time_dim},
                        {"cond_dim", p.arch.cond_dim},
                        {"hidden_width", p.arch.hidden_width},
                        {"hidden_layers", p.arch.hidden_layers},
                        {"values", base64_f64(p.values)}});
    }
    j["denoisers"] = dens;

    json codecs = json::array();
    for (const Codec& c : ckpt.registry.codecs) {
        codecs.push_back({{"sample_dim", c.sample_dim},
                          {"latent_dim", c.latent_dim},
                          {"enc_w", base64_f64(c.enc_w)},
                          {"enc_b", base64_f64(c.enc_b)},
                          {"dec_w", base64_f64(c.dec_w)},
                          {"dec_b", base64_f64(c.dec_b)},
                          {"representative", base64_f64(c.representative)},
                          {"representative_label", c.representative_condition.label}});
    }
    j["registry"] = codecs;

    j["loss_history"] = base64_f64(ckpt.loss_history);
    return j.dump(1);
}

Checkpoint checkpoint_from_json(const std::string& text) {
    const json j = json::parse(text);
    Checkpoint ckpt;
    ckpt.version = j.at("version").get<int>();
    if (ckpt.version != 1)
        throw std::runtime_error("checkpoint: unsupported version " +
                                 std::to_string(ckpt.version));
    ckpt.config = config_from_json(j.at("config"));
    ckpt.labels = j.at("labels").get<std::vector<int>>();
    ckpt.medoid_ids = j.at("medoid_ids").get<std::vector<std::size_t>>();
    ckpt.schedule =
        linear_schedule(j.at("schedule").at("steps").get<std::size_t>(),
                        j.at("schedule").at("beta_start").get<double>(),
                        j.at("schedule").at("beta_end").get<double>());

    for (const json& tj : j.at("trajectories")) {
        RepresentativeTrajectory t;
        t.path_id = tj.at("path_id").get<std::size_t>();
        t.condition_label = tj.at("condition_label").get<int>();
        const std::size_t dim = tj.at("dim").get<std::size_t>();
        t.d = f64_base64(tj.at("d").get<std::string>());
        const std::vector<double> flat = f64_base64(tj.at("d_seq").get<std::string>());
        if (dim == 0 || flat.size() % dim != 0)
            throw std::runtime_error("checkpoint: malformed trajectory payload");
        t.d_seq.resize(flat.size() / dim);
        for (std::size_t s = 0; s < t.d_seq.size(); ++s)
            t.d_seq[s] = Latent(flat.begin() + static_cast<std::ptrdiff_t>(s * dim),
                                flat.begin() + static_cast<std::ptrdiff_t>((s + 1) * dim));
        ckpt.trajectories.push_back(std::move(t));
    }

    for (const json& dj : j.at("denoisers")) {
        DenoiserParams p;
        p.arch.latent_dim = dj.at("latent_dim").get<std::size_t>();
        p.arch.time_dim = dj.at("time_dim").get<std::size_t>();
        p.arch.cond_dim = dj.at("cond_dim").get<std::size_t>();
        p.arch.hidden_width = dj.at("hidden_width").get<std::size_t>();
        p.arch.hidden_layers = dj.at("hidden_layers").get<std::size_t>();
        p.values = f64_base64(dj.at("values").get<std::string>());
        if (p.values.size() != param_count(p.arch))
            throw std::runtime_error("checkpoint: denoiser payload size mismatch");
        ckpt.denoisers.push_back(std::move(p));
    }

    for (const json& cj : j.at("registry")) {
        Codec c;
        c.sample_dim = cj.at("sample_dim").get<std::size_t>();
        c.latent_dim = cj.at("latent_dim").get<std::size_t>();
        c.enc_w = f64_base64(cj.at("enc_w").get<std::string>());
        c.enc_b = f64_base64(cj.at("enc_b").get<std::string>());
        c.dec_w = f64_base64(cj.at("dec_w").get<std::string>());
        c.dec_b = f64_base64(cj.at("dec_b").get<std::string>());
        c.representative = f64_base64(cj.at("representative").get<std::string>());
        c.representative_condition =
            make_condition(cj.at("representative_label").get<int>(),
                           ckpt.config.cond_dim, ckpt.config.seed);
        ckpt.registry.codecs.push_back(std::move(c));
    }

    ckpt.loss_history = f64_base64(j.at("loss_history").get<std::string>());
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("save_checkpoint: cannot write " + path.string());
    out << checkpoint_to_json(ckpt) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_checkpoint: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_json(ss.str());
}

}  // namespace dfs
