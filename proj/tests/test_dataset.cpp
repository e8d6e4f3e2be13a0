#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dfs/dataset.hpp"

using namespace dfs;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("mixture2d per-mode sample means land near the configured means") {
    DatasetDescriptor desc;
    desc.mixture.means = {{-4.0, 0.0}, {4.0, 0.0}, {0.0, 6.0}};
    desc.mixture.n_per_mode = 1000;
    const SampleSet ds = gen_data(desc, 7);
    CHECK(ds.size() == 3000);
    CHECK(ds.dim() == 2);

    for (int mode = 0; mode < 3; ++mode) {
        double mx = 0.0, my = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.labels[i] != mode) continue;
            mx += ds.samples.at(i, 0);
            my += ds.samples.at(i, 1);
            ++n;
        }
        CHECK(n == 1000);
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        CHECK(std::abs(mx - desc.mixture.means[mode][0]) < 0.15);
        CHECK(std::abs(my - desc.mixture.means[mode][1]) < 0.15);
    }
}

TEST_CASE("shapes16 rows are 256-dim and bounded to [0,1]") {
    DatasetDescriptor desc;
    desc.kind = DatasetDescriptor::Kind::Shapes16;
    desc.shapes.classes = {"disk"};
    desc.shapes.n_per_class = 25;
    const SampleSet ds = gen_data(desc, 3);
    CHECK(ds.dim() == 256);
    CHECK(ds.size() == 25);
    for (double v : ds.samples.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("unknown shape classes are rejected") {
    DatasetDescriptor desc;
    desc.kind = DatasetDescriptor::Kind::Shapes16;
    desc.shapes.classes = {"pentagon"};
    CHECK_THROWS_AS(gen_data(desc, 1), std::invalid_argument);
}

TEST_CASE("same descriptor and seed give byte-identical files") {
    DatasetDescriptor desc;
    desc.mixture.n_per_mode = 20;
    const fs::path dir1 = fs::temp_directory_path() / "dfs_ds_a";
    const fs::path dir2 = fs::temp_directory_path() / "dfs_ds_b";
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    save_dataset(dir1, gen_data(desc, 77), desc, 77);
    save_dataset(dir2, gen_data(desc, 77), desc, 77);
    CHECK(slurp(dir1 / "data.csv") == slurp(dir2 / "data.csv"));
    CHECK(slurp(dir1 / "manifest.json") == slurp(dir2 / "manifest.json"));
    CHECK(!slurp(dir1 / "manifest.json").empty());

    // Round trip through the CSV.
    const SampleSet ds = gen_data(desc, 77);
    const SampleSet back = load_dataset(dir1 / "data.csv");
    CHECK(back.size() == ds.size());
    CHECK(back.dim() == ds.dim());
    CHECK(back.labels == ds.labels);
    for (std::size_t i = 0; i < ds.samples.data.size(); ++i)
        CHECK(back.samples.data[i] == ds.samples.data[i]);
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("different seeds move the data") {
    DatasetDescriptor desc;
    desc.mixture.n_per_mode = 5;
    const SampleSet a = gen_data(desc, 1);
    const SampleSet b = gen_data(desc, 2);
    CHECK(a.samples.data != b.samples.data);
}
