#include "dfs/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dfs/checkpoint_io.hpp"
#include "dfs/config.hpp"
#include "dfs/dataset.hpp"
#include "dfs/engine.hpp"
#include "dfs/evaluation.hpp"
#include "dfs/io_util.hpp"
#include "dfs/report.hpp"

namespace dfs {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_manifest(const fs::path& dir, const std::vector<std::string>& args,
                    const json& extra) {
    json j;
    j["command"] = args;
    j["details"] = extra;
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(dir / "run_manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
    out << j.dump(2) << '\n';
}

RankTable load_ranks(const fs::path& path, std::size_t blocks) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open ranks file " + path.string());
    RankTable table;
    table.blocks = blocks;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("ranks file: expected 'method,rank' rows");
        table.methods.push_back(line.substr(0, comma));
        table.average_ranks.push_back(std::stod(line.substr(comma + 1)));
    }
    if (table.methods.empty())
        throw std::runtime_error("ranks file: no data rows");
    return table;
}

void write_trace_csv(const fs::path& path,
                     const std::vector<MembershipTrace>& traces,
                     std::size_t steps) {
    if (traces.empty()) throw std::runtime_error("no traces to write");
    const std::size_t paths = traces.front().rows.empty()
                                  ? 0
                                  : traces.front().rows.front().size();
    std::vector<std::string> header = {"sample", "t"};
    for (std::size_t k = 0; k < paths; ++k)
        header.push_back("mu_" + std::to_string(k));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t s = 0; s < traces.size(); ++s) {
        for (std::size_t r = 0; r < traces[s].rows.size(); ++r) {
            std::vector<std::string> row;
            row.push_back(std::to_string(s));
            row.push_back(std::to_string(steps - r));
            for (double v : traces[s].rows[r]) row.push_back(format_double(v));
            rows.push_back(std::move(row));
        }
    }
    write_csv(path, header, rows);
}

// sample,t,mu_0.. rows back into per-sample traces.
std::vector<std::vector<std::vector<double>>> load_trace_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trace file " + path.string());
    std::vector<std::vector<std::vector<double>>> traces;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        const std::size_t sample = std::stoull(cell);
        std::getline(ss, cell, ',');  // t column, rows arrive in order
        std::vector<double> mu;
        while (std::getline(ss, cell, ',')) mu.push_back(std::stod(cell));
        if (traces.size() <= sample) traces.resize(sample + 1);
        traces[sample].push_back(std::move(mu));
    }
    if (traces.empty()) throw std::runtime_error("trace file has no rows");
    return traces;
}

SampleSet build_dataset(const RunConfig& cfg, std::uint64_t seed) {
    return gen_data(cfg.dataset, seed);
}

void save_samples_csv(const fs::path& path, const Tensor& samples, int label) {
    std::vector<std::string> header = {"label"};
    for (std::size_t c = 0; c < samples.cols(); ++c)
        header.push_back("x" + std::to_string(c));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t r = 0; r < samples.rows(); ++r) {
        std::vector<std::string> row;
        row.push_back(std::to_string(label));
        for (std::size_t c = 0; c < samples.cols(); ++c)
            row.push_back(format_double(samples.at(r, c)));
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

int run_gen_data(const std::vector<std::string>& args,
                 const std::string& config_path, const std::string& out_override,
                 std::int64_t seed_override) {
    RunConfig cfg = parse_config_file(config_path);
    const std::uint64_t seed = seed_override >= 0
                                   ? static_cast<std::uint64_t>(seed_override)
                                   : cfg.dataset_seed;
    const fs::path dir =
        out_override.empty() ? fs::path(cfg.output_dir) / "data" : fs::path(out_override);
    const SampleSet ds = gen_data(cfg.dataset, seed);
    save_dataset(dir, ds, cfg.dataset, seed);
    write_manifest(dir, args, json{{"config", config_to_text(cfg)}, {"seed", seed}});
    std::cout << "wrote " << ds.size() << " samples to " << (dir / "data.csv").string()
              << "\n";
    return 0;
}

int run_cluster(const std::string& data_path, std::size_t k, std::uint64_t seed,
                const std::string& out) {
    const SampleSet ds = load_dataset(data_path);
    RngStream rng(seed, "cluster");
    const std::vector<Latent> rows = ds.rows();
    const std::vector<std::size_t> medoids = kmedoids(rows, k, rng);
    json j;
    j["k"] = k;
    j["seed"] = seed;
    j["medoid_ids"] = medoids;
    j["cost"] = kmedoids_cost(rows, medoids);
    const std::string text = j.dump(2);
    if (!out.empty()) {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + out);
        f << text << '\n';
    }
    std::cout << text << "\n";
    return 0;
}

int run_train(const std::vector<std::string>& args, const std::string& config_path,
              const std::string& out_override) {
    const RunConfig cfg = parse_config_file(config_path);
    const fs::path dir =
        out_override.empty() ? fs::path(cfg.output_dir) : fs::path(out_override);
    std::error_code ec;
    fs::create_directories(dir, ec);

    const SampleSet train_set = build_dataset(cfg, cfg.dataset_seed);
    const Checkpoint ckpt = train(train_set, cfg.engine);
    save_checkpoint(dir / "checkpoint.json", ckpt);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t e = 0; e < ckpt.loss_history.size(); ++e)
        rows.push_back({std::to_string(e), format_double(ckpt.loss_history[e])});
    write_csv(dir / "loss_history.csv", {"epoch", "loss"}, rows);
    write_manifest(dir, args,
                   json{{"config", config_to_text(cfg)},
                        {"dataset_seed", cfg.dataset_seed},
                        {"engine_seed", cfg.engine.seed}});
    std::cout << "checkpoint: " << (dir / "checkpoint.json").string() << "\n";
    return 0;
}

int run_sample(const std::vector<std::string>& args, const std::string& ckpt_path,
               int cond, std::size_t n, std::uint64_t seed,
               const std::string& out) {
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    RngStream rng(seed, "sample-cli");
    const GenerationResult gen = generate(ckpt, cond, n, rng);
    const fs::path dir = out.empty() ? fs::path("samples_out") : fs::path(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    save_samples_csv(dir / "samples.csv", gen.samples, cond);
    write_trace_csv(dir / "trace.csv", gen.traces, ckpt.config.steps);
    write_manifest(dir, args,
                   json{{"checkpoint", ckpt_path}, {"cond", cond}, {"n", n}, {"seed", seed}});
    std::cout << "wrote " << n << " samples to " << (dir / "samples.csv").string() << "\n";
    return 0;
}

int run_eval(const std::string& real_path, const std::string& gen_path,
             const std::string& metrics, const std::string& out,
             std::uint64_t seed) {
    const SampleSet real = load_dataset(real_path);
    const SampleSet gen = load_dataset(gen_path);

    std::vector<std::string> header;
    std::vector<std::string> row;
    std::stringstream ss(metrics);
    std::string name;
    while (std::getline(ss, name, ',')) {
        if (name == "frechet") {
            header.push_back("frechet");
            row.push_back(format_double(gaussian_frechet(real.samples, gen.samples)));
        } else if (name == "sw2") {
            RngStream rng(seed, "eval-sw2");
            header.push_back("sliced_w2");
            row.push_back(format_double(sliced_w2(real.samples, gen.samples, 128, rng)));
        } else if (name == "knn") {
            const auto [p, r] = knn_precision_recall(real.samples, gen.samples, 3);
            header.push_back("knn_precision");
            row.push_back(format_double(p));
            header.push_back("knn_recall");
            row.push_back(format_double(r));
        } else if (name == "psnr") {
            if (real.size() != gen.size())
                throw std::invalid_argument("psnr: sets must have equal sizes");
            double acc = 0.0;
            for (std::size_t i = 0; i < real.size(); ++i)
                acc += psnr(real.samples.row(i), gen.samples.row(i), 1.0);
            header.push_back("psnr_mean");
            row.push_back(format_double(acc / static_cast<double>(real.size())));
        } else if (name == "ssim") {
            if (real.size() != gen.size())
                throw std::invalid_argument("ssim: sets must have equal sizes");
            const auto side = static_cast<std::size_t>(
                std::llround(std::sqrt(static_cast<double>(real.dim()))));
            if (side * side != real.dim())
                throw std::invalid_argument("ssim: samples are not square images");
            double acc = 0.0;
            for (std::size_t i = 0; i < real.size(); ++i)
                acc += ssim(real.samples.row(i), gen.samples.row(i), side, side, 8, 1.0);
            header.push_back("ssim_mean");
            row.push_back(format_double(acc / static_cast<double>(real.size())));
        } else {
            throw std::invalid_argument("unknown metric '" + name + "'");
        }
    }
    if (header.empty()) throw std::invalid_argument("no metrics requested");

    std::ostringstream text;
    for (std::size_t i = 0; i < header.size(); ++i)
        text << (i ? "," : "") << header[i];
    text << "\n";
    for (std::size_t i = 0; i < row.size(); ++i) text << (i ? "," : "") << row[i];
    text << "\n";
    std::cout << text.str();
    if (!out.empty()) write_csv(out, header, {row});
    return 0;
}

int run_ablate(const std::vector<std::string>& args, const std::string& config_path,
               const std::string& mode_name, const std::string& out_override) {
    const RunConfig cfg = parse_config_file(config_path);
    AblationMode mode;
    if (mode_name == "full") mode = AblationMode::Full;
    else if (mode_name == "dfs-i") mode = AblationMode::DfsI;
    else if (mode_name == "dfs-is") mode = AblationMode::DfsIs;
    else if (mode_name == "dfs-isl") mode = AblationMode::DfsIsl;
    else throw std::invalid_argument("unknown ablation mode '" + mode_name + "'");

    const fs::path dir =
        out_override.empty() ? fs::path(cfg.output_dir) : fs::path(out_override);
    std::error_code ec;
    fs::create_directories(dir, ec);

    const SampleSet train_set = build_dataset(cfg, cfg.dataset_seed);
    const SampleSet holdout = build_dataset(cfg, cfg.holdout_seed);
    const AblationReport report = run_ablation(train_set, holdout, cfg.engine, mode);

    const std::vector<std::string> header = {"mode", "frechet", "sliced_w2",
                                             "knn_precision", "knn_recall"};
    const std::vector<std::string> row = {
        to_string(report.mode), format_double(report.frechet),
        format_double(report.sliced_w2), format_double(report.precision),
        format_double(report.recall)};
    const fs::path metrics_path = dir / ("ablate_" + mode_name + "_metrics.csv");
    write_csv(metrics_path, header, {row});
    write_trace_csv(dir / ("ablate_" + mode_name + "_trace.csv"), report.traces,
                    cfg.engine.steps);
    write_manifest(dir, args, json{{"config", config_to_text(cfg)}, {"mode", mode_name}});

    for (std::size_t i = 0; i < header.size(); ++i)
        std::cout << (i ? "," : "") << header[i];
    std::cout << "\n";
    for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "," : "") << row[i];
    std::cout << "\n";
    return 0;
}

int run_convergence(const std::string& trace_path, double tail,
                    const std::string& out_override) {
    const auto traces = load_trace_csv(trace_path);
    const fs::path dir =
        out_override.empty() ? fs::path(trace_path).parent_path() : fs::path(out_override);
    std::error_code ec;
    fs::create_directories(dir, ec);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t s = 0; s < traces.size(); ++s) {
        if (traces[s].empty()) continue;
        const std::vector<double> stdevs = membership_stability(traces[s], tail);
        for (std::size_t k = 0; k < stdevs.size(); ++k)
            rows.push_back({std::to_string(s), std::to_string(k),
                            format_double(stdevs[k])});
    }
    write_csv(dir / "stability.csv", {"sample", "path", "stddev_tail"}, rows);

    // Plot the first sample's memberships across the reverse steps.
    const auto& first = traces.front();
    const std::size_t steps = first.size();
    const std::size_t paths = first.front().size();
    std::vector<double> xs(steps);
    std::vector<std::vector<double>> series(paths, std::vector<double>(steps));
    std::vector<std::string> names;
    for (std::size_t r = 0; r < steps; ++r) {
        xs[r] = static_cast<double>(steps - r);  // t = T .. 1
        for (std::size_t k = 0; k < paths; ++k) series[k][r] = first[r][k];
    }
    for (std::size_t k = 0; k < paths; ++k)
        names.push_back("path " + std::to_string(k));
    write_svg_lines(dir / "convergence.svg", xs, series, names,
                    "Membership convergence", "t (reverse step)", "membership");
    std::cout << "wrote " << (dir / "stability.csv").string() << " and "
              << (dir / "convergence.svg").string() << "\n";
    return 0;
}

int run_stats(const std::string& which, const std::string& ranks_path,
              std::size_t blocks, std::int64_t control, double alpha,
              const std::string& out) {
    const RankTable table = load_ranks(ranks_path, blocks);
    std::ostringstream text;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    if (which == "friedman") {
        const auto [statistic, p] = friedman(table);
        header = {"k", "n_blocks", "statistic", "p_value"};
        rows.push_back({std::to_string(table.methods.size()), std::to_string(blocks),
                        format_double(statistic), format_double(p)});
    } else {
        std::size_t control_index = 0;
        if (control >= 0) {
            control_index = static_cast<std::size_t>(control);
        } else {
            // Default control: the best (lowest) average rank.
            for (std::size_t i = 1; i < table.average_ranks.size(); ++i)
                if (table.average_ranks[i] < table.average_ranks[control_index])
                    control_index = i;
        }
        const auto comparisons = holm(table, control_index, alpha);
        header = {"method", "z", "p_value", "holm_threshold", "reject"};
        for (const HolmComparison& c : comparisons)
            rows.push_back({table.methods[c.method_index], format_double(c.z),
                            format_double(c.p), format_double(c.threshold),
                            c.reject ? "reject" : "accept"});
    }

    for (std::size_t i = 0; i < header.size(); ++i)
        text << (i ? "," : "") << header[i];
    text << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) text << (i ? "," : "") << row[i];
        text << "\n";
    }
    std::cout << text.str();
    if (!out.empty()) write_csv(out, header, rows);
    return 0;
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
    CLI::App app{"fuzzy-rule-guided multi-path latent diffusion engine"};
    app.require_subcommand(1);

    std::string config_path, out_dir, data_path, ckpt_path, real_path, gen_path;
    std::string metrics = "frechet,sw2";
    std::string trace_path, ranks_path, mode_name;
    std::size_t k = 3, n = 100, blocks = 2;
    std::uint64_t seed = 1;
    std::int64_t seed_override = -1, control = -1;
    int cond = 0;
    double tail = 0.25, alpha = 0.05;

    CLI::App* cmd_gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
    cmd_gen->add_option("--config", config_path, "run config file")->required();
    cmd_gen->add_option("--out", out_dir, "output directory");
    cmd_gen->add_option("--seed", seed_override, "override dataset seed");

    CLI::App* cmd_cluster = app.add_subcommand("cluster", "k-medoids medoid indices");
    cmd_cluster->add_option("--data", data_path, "dataset csv")->required();
    cmd_cluster->add_option("--k", k, "number of medoids")->required();
    cmd_cluster->add_option("--seed", seed, "rng seed")->required();
    cmd_cluster->add_option("--out", out_dir, "output json file");

    CLI::App* cmd_train = app.add_subcommand("train", "train a checkpoint");
    cmd_train->add_option("--config", config_path, "run config file")->required();
    cmd_train->add_option("--out", out_dir, "output directory");

    CLI::App* cmd_sample = app.add_subcommand("sample", "generate from a checkpoint");
    cmd_sample->add_option("--checkpoint", ckpt_path, "checkpoint json")->required();
    cmd_sample->add_option("--cond", cond, "condition label")->required();
    cmd_sample->add_option("--n", n, "sample count")->required();
    cmd_sample->add_option("--seed", seed, "rng seed")->required();
    cmd_sample->add_option("--out", out_dir, "output directory");

    CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate generated samples");
    cmd_eval->add_option("--real", real_path, "reference csv")->required();
    cmd_eval->add_option("--gen", gen_path, "generated csv")->required();
    cmd_eval->add_option("--metrics", metrics, "comma-separated metric list");
    cmd_eval->add_option("--seed", seed, "rng seed for projection draws");
    cmd_eval->add_option("--out", out_dir, "output csv file");

    CLI::App* cmd_ablate = app.add_subcommand("ablate", "train+generate+evaluate one mode");
    cmd_ablate->add_option("--config", config_path, "run config file")->required();
    cmd_ablate->add_option("--mode", mode_name, "full|dfs-i|dfs-is|dfs-isl")->required();
    cmd_ablate->add_option("--out", out_dir, "output directory");

    CLI::App* cmd_conv = app.add_subcommand("convergence", "membership stability report");
    cmd_conv->add_option("--trace", trace_path, "trace csv")->required();
    cmd_conv->add_option("--tail", tail, "tail fraction of reverse steps");
    cmd_conv->add_option("--out", out_dir, "output directory");

    CLI::App* cmd_stats = app.add_subcommand("stats", "rank-based statistical tests");
    cmd_stats->require_subcommand(1);
    CLI::App* cmd_friedman = cmd_stats->add_subcommand("friedman", "Friedman test");
    cmd_friedman->add_option("--ranks", ranks_path, "method,rank csv")->required();
    cmd_friedman->add_option("--n-blocks", blocks, "block count")->required();
    cmd_friedman->add_option("--out", out_dir, "output csv file");
    CLI::App* cmd_holm = cmd_stats->add_subcommand("holm", "Holm post-hoc test");
    cmd_holm->add_option("--ranks", ranks_path, "method,rank csv")->required();
    cmd_holm->add_option("--n-blocks", blocks, "block count")->required();
    cmd_holm->add_option("--control", control, "control method index (default: best rank)");
    cmd_holm->add_option("--alpha", alpha, "family-wise significance level");
    cmd_holm->add_option("--out", out_dir, "output csv file");

    std::vector<const char*> argv;
    argv.push_back("dfs");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help and friends.
            return app.exit(e);
        }
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (cmd_gen->parsed())
            return run_gen_data(args, config_path, out_dir, seed_override);
        if (cmd_cluster->parsed()) return run_cluster(data_path, k, seed, out_dir);
        if (cmd_train->parsed()) return run_train(args, config_path, out_dir);
        if (cmd_sample->parsed())
            return run_sample(args, ckpt_path, cond, n, seed, out_dir);
        if (cmd_eval->parsed())
            return run_eval(real_path, gen_path, metrics, out_dir, seed);
        if (cmd_ablate->parsed())
            return run_ablate(args, config_path, mode_name, out_dir);
        if (cmd_conv->parsed()) return run_convergence(trace_path, tail, out_dir);
        if (cmd_stats->parsed()) {
            const std::string which =
                cmd_friedman->parsed() ? "friedman" : "holm";
            return run_stats(which, ranks_path, blocks, control, alpha, out_dir);
        }
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace dfs
