#include "dfs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dfs/io_util.hpp"

namespace dfs {

namespace {

constexpr std::size_t kGrid = 16;

double soft_edge(double d, double softness) {
    return 1.0 / (1.0 + std::exp(d / softness));
}

void render_shape(const std::string& cls, RngStream& rng, double noise,
                  double* out) {
    const double cx = 7.5 + 0.7 * (2.0 * rng.next_double() - 1.0);
    const double cy = 7.5 + 0.7 * (2.0 * rng.next_double() - 1.0);
    const double size_jitter = 2.0 * rng.next_double() - 1.0;

    for (std::size_t y = 0; y < kGrid; ++y) {
        for (std::size_t x = 0; x < kGrid; ++x) {
            const double dx = static_cast<double>(x) - cx;
            const double dy = static_cast<double>(y) - cy;
            double v = 0.0;
            if (cls == "disk") {
                const double r = 4.5 + 0.8 * size_jitter;
                v = soft_edge(std::sqrt(dx * dx + dy * dy) - r, 0.8);
            } else if (cls == "cross") {
                const double w = 1.6 + 0.3 * size_jitter;
                const double len = 6.0;
                const double horiz = soft_edge(std::abs(dy) - w, 0.6) *
                                     soft_edge(std::abs(dx) - len, 0.6);
                const double vert = soft_edge(std::abs(dx) - w, 0.6) *
                                    soft_edge(std::abs(dy) - len, 0.6);
                v = std::max(horiz, vert);
            } else if (cls == "square") {
                const double h = 4.2 + 0.8 * size_jitter;
                v = soft_edge(std::abs(dx) - h, 0.7) * soft_edge(std::abs(dy) - h, 0.7);
            } else {
                throw std::invalid_argument("gen_data: unknown shape class '" + cls + "'");
            }
            v += noise * rng.next_normal();
            out[y * kGrid + x] = std::clamp(v, 0.0, 1.0);
        }
    }
}

}  // namespace

std::vector<int> SampleSet::distinct_labels() const {
    std::set<int> s(labels.begin(), labels.end());
    return std::vector<int>(s.begin(), s.end());
}

std::vector<Latent> SampleSet::rows() const {
    std::vector<Latent> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(samples.row(i));
    return out;
}

SampleSet gen_data(const DatasetDescriptor& descriptor, std::uint64_t seed) {
    SampleSet ds;
    RngStream root(seed, "dataset");

    if (descriptor.kind == DatasetDescriptor::Kind::Mixture2d) {
        const Mixture2dSpec& spec = descriptor.mixture;
        if (spec.means.empty() || spec.n_per_mode == 0)
            throw std::invalid_argument("gen_data: empty mixture spec");
        const std::size_t n = spec.means.size() * spec.n_per_mode;
        ds.samples = Tensor::zeros({n, 2});
        ds.labels.resize(n);
        const double std_dev = std::sqrt(spec.cov_scale);
        std::size_t row = 0;
        for (std::size_t m = 0; m < spec.means.size(); ++m) {
            RngStream mode_rng = root.fork("mode").fork(m);
            for (std::size_t i = 0; i < spec.n_per_mode; ++i, ++row) {
                ds.samples.at(row, 0) = spec.means[m][0] + std_dev * mode_rng.next_normal();
                ds.samples.at(row, 1) = spec.means[m][1] + std_dev * mode_rng.next_normal();
                ds.labels[row] = static_cast<int>(m);
            }
        }
    } else {
        const Shapes16Spec& spec = descriptor.shapes;
        if (spec.classes.empty() || spec.n_per_class == 0)
            throw std::invalid_argument("gen_data: empty shapes spec");
        const std::size_t n = spec.classes.size() * spec.n_per_class;
        ds.samples = Tensor::zeros({n, kGrid * kGrid});
        ds.labels.resize(n);
        std::size_t row = 0;
        for (std::size_t c = 0; c < spec.classes.size(); ++c) {
            RngStream cls_rng = root.fork("class").fork(c);
            for (std::size_t i = 0; i < spec.n_per_class; ++i, ++row) {
                render_shape(spec.classes[c], cls_rng, spec.noise,
                             ds.samples.data.data() + row * kGrid * kGrid);
                ds.labels[row] = static_cast<int>(c);
            }
        }
    }
    return ds;
}

std::string descriptor_to_json(const DatasetDescriptor& d, std::uint64_t seed) {
    nlohmann::json j;
    j["seed"] = seed;
    if (d.kind == DatasetDescriptor::Kind::Mixture2d) {
        j["kind"] = "mixture2d";
        nlohmann::json means = nlohmann::json::array();
        for (const auto& m : d.mixture.means) means.push_back({m[0], m[1]});
        j["means"] = means;
        j["cov_scale"] = d.mixture.cov_scale;
        j["n_per_mode"] = d.mixture.n_per_mode;
    } else {
        j["kind"] = "shapes16";
        j["classes"] = d.shapes.classes;
        j["n_per_class"] = d.shapes.n_per_class;
        j["noise"] = d.shapes.noise;
    }
    return j.dump(2);
}

void save_dataset(const std::filesystem::path& dir, const SampleSet& data,
                  const DatasetDescriptor& descriptor, std::uint64_t seed) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream csv(dir / "data.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("save_dataset: cannot write " +
                                       (dir / "data.csv").string());
    csv << "label";
    for (std::size_t c = 0; c < data.dim(); ++c) csv << ",x" << c;
    csv << "\r\n";
    for (std::size_t r = 0; r < data.size(); ++r) {
        csv << data.labels[r];
        for (std::size_t c = 0; c < data.dim(); ++c)
            csv << ',' << format_double(data.samples.at(r, c));
        csv << "\r\n";
    }
    csv.close();

    std::ofstream manifest(dir / "manifest.json", std::ios::binary);
    if (!manifest)
        throw std::runtime_error("save_dataset: cannot write manifest");
    manifest << descriptor_to_json(descriptor, seed) << '\n';
}

SampleSet load_dataset(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_dataset: cannot open " + csv_path.string());
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("load_dataset: empty file " + csv_path.string());

    std::vector<int> labels;
    std::vector<double> values;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        labels.push_back(std::stoi(cell));
        std::size_t count = 0;
        while (std::getline(ss, cell, ',')) {
            values.push_back(std::stod(cell));
            ++count;
        }
        if (dim == 0) dim = count;
        if (count != dim)
            throw std::runtime_error("load_dataset: ragged row in " + csv_path.string());
    }
    SampleSet ds;
    ds.samples = Tensor({labels.size(), dim}, std::move(values));
    ds.labels = std::move(labels);
    return ds;
}

}  // namespace dfs
