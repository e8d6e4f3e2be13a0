#include "dfs/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dfs/io_util.hpp"

namespace dfs {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t line_no, const std::string& msg) {
    throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + msg);
}

double to_double(const std::string& v, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) fail(line_no, "trailing characters in number '" + v + "'");
        return d;
    } catch (const std::invalid_argument&) {
        fail(line_no, "not a number: '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& v, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const unsigned long long u = std::stoull(v, &pos);
        if (pos != v.size()) fail(line_no, "trailing characters in integer '" + v + "'");
        return u;
    } catch (const std::invalid_argument&) {
        fail(line_no, "not an integer: '" + v + "'");
    }
}

bool to_bool(const std::string& v, std::size_t line_no) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(line_no, "not a boolean: '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

WeightingMode parse_weighting(const std::string& v, std::size_t line_no) {
    if (v == "gate-only") return WeightingMode::GateOnly;
    if (v == "verbatim") return WeightingMode::Verbatim;
    if (v == "renormalized") return WeightingMode::Renormalized;
    fail(line_no, "unknown weighting mode '" + v + "'");
}

PathMode parse_path_mode(const std::string& v, std::size_t line_no) {
    if (v == "per-path") return PathMode::PerPath;
    if (v == "shared") return PathMode::Shared;
    fail(line_no, "unknown path mode '" + v + "'");
}

ReverseStepMode parse_reverse(const std::string& v, std::size_t line_no) {
    if (v == "exact-inverse") return ReverseStepMode::ExactInverse;
    if (v == "ddpm-posterior") return ReverseStepMode::DdpmPosterior;
    fail(line_no, "unknown reverse step '" + v + "'");
}

TrajectoryMode parse_trajectory(const std::string& v, std::size_t line_no) {
    if (v == "mean") return TrajectoryMode::Mean;
    if (v == "sampled") return TrajectoryMode::Sampled;
    fail(line_no, "unknown trajectory mode '" + v + "'");
}

AblationMode parse_ablation(const std::string& v, std::size_t line_no) {
    if (v == "full") return AblationMode::Full;
    if (v == "dfs-i") return AblationMode::DfsI;
    if (v == "dfs-is") return AblationMode::DfsIs;
    if (v == "dfs-isl") return AblationMode::DfsIsl;
    fail(line_no, "unknown ablation mode '" + v + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw_line;
    std::string section;
    std::size_t line_no = 0;
    bool engine_seed_set = false;

    while (std::getline(in, raw_line)) {
        ++line_no;
        const std::string line = trim(raw_line);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "malformed section header");
            section = line.substr(1, line.size() - 2);
            if (section != "dataset" && section != "codec" && section != "engine" &&
                section != "output")
                fail(line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) fail(line_no, "key outside any section");

        if (section == "dataset") {
            if (key == "kind") {
                if (value == "mixture2d")
                    cfg.dataset.kind = DatasetDescriptor::Kind::Mixture2d;
                else if (value == "shapes16")
                    cfg.dataset.kind = DatasetDescriptor::Kind::Shapes16;
                else
                    fail(line_no, "unknown dataset kind '" + value + "'");
            } else if (key == "means") {
                cfg.dataset.mixture.means.clear();
                for (const std::string& pair : split(value, ';')) {
                    const std::vector<std::string> xy = split(pair, ',');
                    if (xy.size() != 2) fail(line_no, "mean must be 'x,y'");
                    cfg.dataset.mixture.means.push_back(
                        {to_double(xy[0], line_no), to_double(xy[1], line_no)});
                }
            } else if (key == "cov_scale") {
                cfg.dataset.mixture.cov_scale = to_double(value, line_no);
            } else if (key == "n_per_mode") {
                cfg.dataset.mixture.n_per_mode = to_u64(value, line_no);
            } else if (key == "classes") {
                cfg.dataset.shapes.classes = split(value, ',');
            } else if (key == "n_per_class") {
                cfg.dataset.shapes.n_per_class = to_u64(value, line_no);
            } else if (key == "noise") {
                cfg.dataset.shapes.noise = to_double(value, line_no);
            } else if (key == "seed") {
                cfg.dataset_seed = to_u64(value, line_no);
            } else if (key == "holdout_seed") {
                cfg.holdout_seed = to_u64(value, line_no);
            } else {
                fail(line_no, "unknown key '" + key + "' in [dataset]");
            }
        } else if (section == "codec") {
            if (key == "mode") {
                if (value == "identity")
                    cfg.engine.codec.mode = CodecConfig::Mode::Identity;
                else if (value == "linear")
                    cfg.engine.codec.mode = CodecConfig::Mode::Linear;
                else
                    fail(line_no, "unknown codec mode '" + value + "'");
            } else if (key == "latent_dim") {
                cfg.engine.codec.latent_dim = to_u64(value, line_no);
            } else if (key == "epochs") {
                cfg.engine.codec.epochs = to_u64(value, line_no);
            } else if (key == "per_label") {
                cfg.engine.codec.per_label = to_bool(value, line_no);
            } else {
                fail(line_no, "unknown key '" + key + "' in [codec]");
            }
        } else if (section == "engine") {
            if (key == "paths") cfg.engine.paths = to_u64(value, line_no);
            else if (key == "steps") cfg.engine.steps = to_u64(value, line_no);
            else if (key == "alpha") cfg.engine.alpha = to_double(value, line_no);
            else if (key == "weighting") cfg.engine.weighting = parse_weighting(value, line_no);
            else if (key == "path_mode") cfg.engine.path_mode = parse_path_mode(value, line_no);
            else if (key == "reverse_step") cfg.engine.reverse_step = parse_reverse(value, line_no);
            else if (key == "trajectory") cfg.engine.trajectory = parse_trajectory(value, line_no);
            else if (key == "ablation") cfg.engine.ablation = parse_ablation(value, line_no);
            else if (key == "beta_start") cfg.engine.beta_start = to_double(value, line_no);
            else if (key == "beta_end") cfg.engine.beta_end = to_double(value, line_no);
            else if (key == "hidden_width") cfg.engine.hidden_width = to_u64(value, line_no);
            else if (key == "hidden_layers") cfg.engine.hidden_layers = to_u64(value, line_no);
            else if (key == "time_dim") cfg.engine.time_dim = to_u64(value, line_no);
            else if (key == "cond_dim") cfg.engine.cond_dim = to_u64(value, line_no);
            else if (key == "lr") cfg.engine.lr = to_double(value, line_no);
            else if (key == "batch") cfg.engine.batch = to_u64(value, line_no);
            else if (key == "epochs") cfg.engine.epochs = to_u64(value, line_no);
            else if (key == "gen_n") cfg.engine.gen_n = to_u64(value, line_no);
            else if (key == "seed") {
                cfg.engine.seed = to_u64(value, line_no);
                engine_seed_set = true;
            } else fail(line_no, "unknown key '" + key + "' in [engine]");
        } else if (section == "output") {
            if (key == "dir") cfg.output_dir = value;
            else if (key == "seeds") {
                cfg.seeds.clear();
                for (const std::string& s : split(value, ','))
                    cfg.seeds.push_back(to_u64(s, line_no));
            } else fail(line_no, "unknown key '" + key + "' in [output]");
        }
    }
    (void)engine_seed_set;

    if (const char* env = std::getenv("DFS_SEED")) {
        cfg.engine.seed = std::stoull(env);
    }
    return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_to_text(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[dataset]\n";
    if (cfg.dataset.kind == DatasetDescriptor::Kind::Mixture2d) {
        out << "kind = mixture2d\n";
        out << "means = ";
        for (std::size_t i = 0; i < cfg.dataset.mixture.means.size(); ++i) {
            if (i) out << "; ";
            out << format_double(cfg.dataset.mixture.means[i][0]) << ","
                << format_double(cfg.dataset.mixture.means[i][1]);
        }
        out << "\n";
        out << "cov_scale = " << format_double(cfg.dataset.mixture.cov_scale) << "\n";
        out << "n_per_mode = " << cfg.dataset.mixture.n_per_mode << "\n";
    } else {
        out << "kind = shapes16\n";
        out << "classes = ";
        for (std::size_t i = 0; i < cfg.dataset.shapes.classes.size(); ++i) {
            if (i) out << ",";
            out << cfg.dataset.shapes.classes[i];
        }
        out << "\n";
        out << "n_per_class = " << cfg.dataset.shapes.n_per_class << "\n";
        out << "noise = " << format_double(cfg.dataset.shapes.noise) << "\n";
    }
    out << "seed = " << cfg.dataset_seed << "\n";
    out << "holdout_seed = " << cfg.holdout_seed << "\n";

    out << "\n[codec]\n";
    out << "mode = "
        << (cfg.engine.codec.mode == CodecConfig::Mode::Identity ? "identity" : "linear")
        << "\n";
    out << "latent_dim = " << cfg.engine.codec.latent_dim << "\n";
    out << "epochs = " << cfg.engine.codec.epochs << "\n";
    out << "per_label = " << (cfg.engine.codec.per_label ? "true" : "false") << "\n";

    const EngineConfig& e = cfg.engine;
    out << "\n[engine]\n";
    out << "paths = " << e.paths << "\n";
    out << "steps = " << e.steps << "\n";
    out << "alpha = " << format_double(e.alpha) << "\n";
    out << "weighting = " << to_string(e.weighting) << "\n";
    out << "path_mode = " << to_string(e.path_mode) << "\n";
    out << "reverse_step = " << to_string(e.reverse_step) << "\n";
    out << "trajectory = " << to_string(e.trajectory) << "\n";
    out << "ablation = " << to_string(e.ablation) << "\n";
    out << "beta_start = " << format_double(e.beta_start) << "\n";
    out << "beta_end = " << format_double(e.beta_end) << "\n";
    out << "hidden_width = " << e.hidden_width << "\n";
    out << "hidden_layers = " << e.hidden_layers << "\n";
    out << "time_dim = " << e.time_dim << "\n";
    out << "cond_dim = " << e.cond_dim << "\n";
    out << "lr = " << format_double(e.lr) << "\n";
    out << "batch = " << e.batch << "\n";
    out << "epochs = " << e.epochs << "\n";
    out << "gen_n = " << e.gen_n << "\n";
    out << "seed = " << e.seed << "\n";

    out << "\n[output]\n";
    out << "dir = " << cfg.output_dir << "\n";
    if (!cfg.seeds.empty()) {
        out << "seeds = ";
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
            if (i) out << ",";
            out << cfg.seeds[i];
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace dfs
