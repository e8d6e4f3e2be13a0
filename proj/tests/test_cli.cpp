#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dfs/checkpoint_io.hpp"
#include "dfs/cli.hpp"
#include "dfs/config.hpp"
#include "dfs/engine.hpp"

using namespace dfs;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string tiny_config_text(const fs::path& out_dir) {
    std::ostringstream cfg;
    cfg << "[dataset]\n"
        << "kind = mixture2d\n"
        << "means = -4,0; 4,0; 0,6\n"
        << "cov_scale = 1.0\n"
        << "n_per_mode = 30\n"
        << "seed = 7\n"
        << "holdout_seed = 8\n"
        << "\n[codec]\n"
        << "mode = identity\n"
        << "\n[engine]\n"
        << "paths = 2\n"
        << "steps = 20\n"
        << "hidden_width = 8\n"
        << "batch = 32\n"
        << "epochs = 1\n"
        << "seed = 3\n"
        << "gen_n = 30\n"
        << "\n[output]\n"
        << "dir = " << out_dir.string() << "\n";
    return cfg.str();
}

fs::path write_tiny_config(const fs::path& dir) {
    const fs::path path = dir / "run.cfg";
    std::ofstream out(path, std::ios::binary);
    out << tiny_config_text(dir);
    out.close();
    return path;
}

}  // namespace

TEST_CASE("config parsing: defaults, enums, and strict keys") {
    const RunConfig cfg = parse_config_text(
        "[engine]\npaths = 5\nweighting = verbatim\n[output]\nseeds = 1,2,3\n");
    CHECK(cfg.engine.paths == 5);
    CHECK(cfg.engine.weighting == WeightingMode::Verbatim);
    CHECK(cfg.engine.steps == 1000);  // untouched default
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(cfg.effective_seeds().size() == 3);

    CHECK_THROWS_AS(parse_config_text("[engine]\nbogus = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[nonsense]\nx = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("orphan = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[engine]\npaths = abc\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[engine]\nweighting = sometimes\n"),
                    std::invalid_argument);
}

TEST_CASE("config text round-trips through the parser") {
    const fs::path dir = fresh_dir("dfs_cfg_rt");
    RunConfig cfg = parse_config_text(tiny_config_text(dir));
    const RunConfig again = parse_config_text(config_to_text(cfg));
    CHECK(config_to_text(cfg) == config_to_text(again));
    fs::remove_all(dir);
}

TEST_CASE("DFS_SEED environment variable overrides the engine seed") {
    setenv("DFS_SEED", "4242", 1);
    const RunConfig cfg = parse_config_text("[engine]\nseed = 1\n");
    unsetenv("DFS_SEED");
    CHECK(cfg.engine.seed == 4242);
}

TEST_CASE("gen-data produces byte-identical reruns") {
    const fs::path dir = fresh_dir("dfs_cli_gen");
    const fs::path cfg = write_tiny_config(dir);

    const fs::path out1 = dir / "d1";
    const fs::path out2 = dir / "d2";
    CHECK(cli_run({"gen-data", "--config", cfg.string(), "--out", out1.string()}) == 0);
    CHECK(cli_run({"gen-data", "--config", cfg.string(), "--out", out2.string()}) == 0);
    CHECK(slurp(out1 / "data.csv") == slurp(out2 / "data.csv"));
    CHECK(fs::exists(out1 / "manifest.json"));
    CHECK(fs::exists(out1 / "run_manifest.json"));
    fs::remove_all(dir);
}

TEST_CASE("cluster emits medoid ids as json") {
    const fs::path dir = fresh_dir("dfs_cli_cluster");
    const fs::path cfg = write_tiny_config(dir);
    const fs::path data_dir = dir / "data";
    REQUIRE(cli_run({"gen-data", "--config", cfg.string(), "--out", data_dir.string()}) == 0);

    const fs::path out = dir / "medoids.json";
    CHECK(cli_run({"cluster", "--data", (data_dir / "data.csv").string(), "--k", "3",
                   "--seed", "5", "--out", out.string()}) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("medoid_ids") != std::string::npos);
    CHECK(text.find("cost") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("train, sample, eval, and convergence round-trip on a tiny run") {
    const fs::path dir = fresh_dir("dfs_cli_train");
    const fs::path cfg = write_tiny_config(dir);

    const fs::path run1 = dir / "run1";
    const fs::path run2 = dir / "run2";
    REQUIRE(cli_run({"train", "--config", cfg.string(), "--out", run1.string()}) == 0);
    REQUIRE(cli_run({"train", "--config", cfg.string(), "--out", run2.string()}) == 0);
    CHECK(slurp(run1 / "checkpoint.json") == slurp(run2 / "checkpoint.json"));
    CHECK(fs::exists(run1 / "loss_history.csv"));

    // Checkpoint save -> load -> save is byte-stable.
    const Checkpoint loaded = load_checkpoint(run1 / "checkpoint.json");
    save_checkpoint(run1 / "checkpoint2.json", loaded);
    CHECK(slurp(run1 / "checkpoint.json") == slurp(run1 / "checkpoint2.json"));

    const fs::path samples = dir / "samples";
    REQUIRE(cli_run({"sample", "--checkpoint", (run1 / "checkpoint.json").string(),
                     "--cond", "1", "--n", "12", "--seed", "9", "--out",
                     samples.string()}) == 0);
    CHECK(fs::exists(samples / "samples.csv"));
    CHECK(fs::exists(samples / "trace.csv"));

    const fs::path data_dir = dir / "data";
    REQUIRE(cli_run({"gen-data", "--config", cfg.string(), "--out", data_dir.string()}) == 0);
    const fs::path metrics = dir / "metrics.csv";
    CHECK(cli_run({"eval", "--real", (data_dir / "data.csv").string(), "--gen",
                   (samples / "samples.csv").string(), "--metrics", "frechet,sw2",
                   "--out", metrics.string()}) == 0);
    const std::string mtext = slurp(metrics);
    CHECK(mtext.find("frechet") != std::string::npos);
    CHECK(mtext.find("sliced_w2") != std::string::npos);

    const fs::path conv = dir / "conv";
    CHECK(cli_run({"convergence", "--trace", (samples / "trace.csv").string(),
                   "--tail", "0.25", "--out", conv.string()}) == 0);
    CHECK(fs::exists(conv / "stability.csv"));
    const std::string svg = slurp(conv / "convergence.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("ablate writes a metric report") {
    const fs::path dir = fresh_dir("dfs_cli_ablate");
    const fs::path cfg = write_tiny_config(dir);
    const fs::path out = dir / "ab";
    REQUIRE(cli_run({"ablate", "--config", cfg.string(), "--mode", "dfs-is",
                     "--out", out.string()}) == 0);
    const std::string text = slurp(out / "ablate_dfs-is_metrics.csv");
    CHECK(text.find("frechet") != std::string::npos);
    CHECK(fs::exists(out / "ablate_dfs-is_trace.csv"));
    fs::remove_all(dir);
}

TEST_CASE("stats friedman and holm match the bundled rank table") {
    const fs::path ranks = fs::path(DFS_SOURCE_DIR) / "assets" / "fid_ranks.csv";
    const fs::path dir = fresh_dir("dfs_cli_stats");

    const fs::path f_out = dir / "friedman.csv";
    REQUIRE(cli_run({"stats", "friedman", "--ranks", ranks.string(), "--n-blocks",
                     "4", "--out", f_out.string()}) == 0);
    const std::string f_text = slurp(f_out);
    CHECK(f_text.find("27.25") != std::string::npos);
    CHECK(f_text.find("0.00064") != std::string::npos);

    const fs::path h_out = dir / "holm.csv";
    REQUIRE(cli_run({"stats", "holm", "--ranks", ranks.string(), "--n-blocks", "4",
                     "--control", "0", "--out", h_out.string()}) == 0);
    const std::string h_text = slurp(h_out);
    CHECK(h_text.find("DDPM") != std::string::npos);
    CHECK(h_text.find("3.87298") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("invalid invocations exit nonzero") {
    CHECK(cli_run({}) != 0);
    CHECK(cli_run({"no-such-command"}) != 0);
    CHECK(cli_run({"train", "--config", "/nonexistent/config.cfg"}) != 0);
    CHECK(cli_run({"stats", "friedman", "--ranks", "/nonexistent.csv",
                   "--n-blocks", "4"}) != 0);

    const fs::path dir = fresh_dir("dfs_cli_bad");
    const fs::path cfg = write_tiny_config(dir);
    const fs::path data_dir = dir / "data";
    REQUIRE(cli_run({"gen-data", "--config", cfg.string(), "--out", data_dir.string()}) == 0);
    CHECK(cli_run({"eval", "--real", (data_dir / "data.csv").string(), "--gen",
                   (data_dir / "data.csv").string(), "--metrics", "nope"}) != 0);
    fs::remove_all(dir);
}
