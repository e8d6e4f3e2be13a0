#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dfs/evaluation.hpp"
#include "dfs/numerics.hpp"
#include "dfs/rng.hpp"

using namespace dfs;

namespace {

// Exact minimum-cost assignment (Jonker-Volgenant potentials), used as the
// dense transport oracle for small point sets.
double min_assignment_cost(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j) total += cost[p[j] - 1][j - 1];
    return total;
}

Tensor gaussian_samples(std::size_t n, double mx, double my, double sx,
                        double sy, RngStream& rng) {
    Tensor t = Tensor::zeros({n, 2});
    for (std::size_t i = 0; i < n; ++i) {
        t.at(i, 0) = mx + sx * rng.next_normal();
        t.at(i, 1) = my + sy * rng.next_normal();
    }
    return t;
}

RankTable table_vi_ranks() {
    RankTable t;
    t.methods = {"DFS", "DDPM", "DDIM", "ADM-G", "GLIDE", "CFDG", "unCLIP", "LDM", "SDG"};
    t.average_ranks = {1.25, 8.75, 7.75, 5.375, 3.5, 6.5, 4.0, 2.0, 5.875};
    t.blocks = 4;
    return t;
}

}  // namespace

TEST_CASE("gaussian_frechet sanity: identical sets and mean shifts") {
    RngStream rng(1, "frechet");
    const Tensor a = gaussian_samples(300, 0.0, 0.0, 1.0, 2.0, rng);
    CHECK(gaussian_frechet(a, a) <= 1e-8);

    Tensor shifted = a;
    for (std::size_t i = 0; i < shifted.rows(); ++i) {
        shifted.at(i, 0) += 3.0;
        shifted.at(i, 1) -= 1.0;
    }
    CHECK(gaussian_frechet(a, shifted) == doctest::Approx(10.0).epsilon(1e-8));
    CHECK(gaussian_frechet(a, shifted) ==
          doctest::Approx(gaussian_frechet(shifted, a)).epsilon(1e-12));
    CHECK_THROWS_AS(gaussian_frechet(a, Tensor::zeros({10, 3})),
                    std::invalid_argument);
}

TEST_CASE("gaussian_frechet matches the diagonal closed form at n=1e4") {
    // Sigma_1 = diag(1, 0.5), Sigma_2 = diag(2, 0.25), means differ by (1,-2):
    // d^2 = 5 + (3 - 2*sqrt(2)) + (0.75 - 2*sqrt(0.125)) = 5.2144661...
    RngStream rng(2, "frechet-closed");
    const Tensor a = gaussian_samples(10000, 0.0, 0.0, 1.0, std::sqrt(0.5), rng);
    const Tensor b =
        gaussian_samples(10000, 1.0, -2.0, std::sqrt(2.0), 0.5, rng);
    const double expected = 5.0 + (3.0 - 2.0 * std::sqrt(2.0)) +
                            (0.75 - 2.0 * std::sqrt(0.125));
    CHECK(gaussian_frechet(a, b) == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("sliced_w2 zero and point-mass cases") {
    RngStream rng(3, "sw2");
    const Tensor a = gaussian_samples(100, 0.0, 0.0, 1.0, 1.0, rng);
    RngStream proj(4, "proj");
    CHECK(sliced_w2(a, a, 32, proj) == doctest::Approx(0.0));

    // 1-D point masses at 0 and c: every projection sees distance c.
    const double c = 2.5;
    Tensor p0({4, 1}, {0.0, 0.0, 0.0, 0.0});
    Tensor pc({4, 1}, {c, c, c, c});
    RngStream proj2(5, "proj");
    CHECK(sliced_w2(p0, pc, 8, proj2) == doctest::Approx(c * c).epsilon(1e-12));
}

TEST_CASE("sliced_w2 tracks the dense transport oracle on Gaussian pairs") {
    const std::size_t n = 400;
    RngStream rng(6, "sw2-oracle");
    const Tensor a = gaussian_samples(n, 0.0, 0.0, 1.0, 0.9, rng);
    const Tensor b = gaussian_samples(n, 3.0, 1.0, 1.2, 0.7, rng);

    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = a.at(i, 0) - b.at(j, 0);
            const double dy = a.at(i, 1) - b.at(j, 1);
            cost[i][j] = dx * dx + dy * dy;
        }
    const double exact = min_assignment_cost(cost) / static_cast<double>(n);

    RngStream proj(7, "proj");
    const double sliced = sliced_w2(a, b, 512, proj);
    CHECK(std::abs(sliced - exact) / exact < 0.10);
}

TEST_CASE("sliced_w2 is deterministic given the stream") {
    RngStream data_rng(12, "sw2-det");
    const Tensor a = gaussian_samples(50, 0.0, 0.0, 1.0, 1.0, data_rng);
    const Tensor b = gaussian_samples(50, 1.0, 0.0, 1.0, 1.0, data_rng);
    RngStream p1(3, "proj");
    RngStream p2(3, "proj");
    CHECK(sliced_w2(a, b, 64, p1) == sliced_w2(a, b, 64, p2));
}

TEST_CASE("wasserstein2_1d handles unequal sizes") {
    // Quantile functions: {0,1} vs {0.5}: integral of (0-0.5)^2 over [0,.5]
    // plus (1-0.5)^2 over [.5,1] = 0.25.
    CHECK(wasserstein2_1d({0.0, 1.0}, {0.5}) == doctest::Approx(0.25));
    CHECK(wasserstein2_1d({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == doctest::Approx(0.0));
}

TEST_CASE("psnr reference points") {
    const Latent a{0.1, 0.4, 0.9};
    CHECK(std::isinf(psnr(a, a, 1.0)));

    // MSE = 0.01 with peak 1 is exactly 20 dB.
    const Latent zeros{0.0, 0.0, 0.0, 0.0};
    const Latent tenth{0.1, 0.1, 0.1, 0.1};
    CHECK(psnr(zeros, tenth, 1.0) == doctest::Approx(20.0).epsilon(1e-12));

    RngStream rng(8, "psnr");
    const Latent x = normal_vector(rng, 32);
    const Latent y = normal_vector(rng, 32);
    double mse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mse += (x[i] - y[i]) * (x[i] - y[i]);
    mse /= 32.0;
    CHECK(psnr(x, y, 2.0) ==
          doctest::Approx(10.0 * std::log10(4.0 / mse)).epsilon(1e-9));
    CHECK_THROWS_AS(psnr(x, normal_vector(rng, 16), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(psnr(x, y, 0.0), std::invalid_argument);
}

TEST_CASE("ssim reference points") {
    RngStream rng(9, "ssim");
    Latent img(256);
    for (double& v : img) v = rng.next_double();
    CHECK(ssim(img, img, 16, 16, 8, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

    // Inverted binary image scores poorly.
    Latent binary(256), inverted(256);
    for (std::size_t i = 0; i < 256; ++i) {
        binary[i] = (i / 16 + i % 16) % 2 == 0 ? 1.0 : 0.0;
        inverted[i] = 1.0 - binary[i];
    }
    CHECK(ssim(binary, inverted, 16, 16, 8, 1.0) < 0.2);

    // Constant images: variance terms vanish, closed form remains.
    const double c1v = 0.3, c2v = 0.7;
    Latent ca(64, c1v), cb(64, c2v);
    const double c1 = 0.01 * 0.01;
    const double expected = (2.0 * c1v * c2v + c1) / (c1v * c1v + c2v * c2v + c1);
    CHECK(ssim(ca, cb, 8, 8, 8, 1.0) == doctest::Approx(expected).epsilon(1e-12));

    CHECK_THROWS_AS(ssim(Latent(16, 0.0), Latent(16, 0.0), 4, 4, 8, 1.0),
                    std::invalid_argument);
}

TEST_CASE("knn precision/recall endpoints") {
    RngStream rng(10, "knn");
    const Tensor real = gaussian_samples(60, 0.0, 0.0, 1.0, 1.0, rng);
    const auto same = knn_precision_recall(real, real, 3);
    CHECK(same.first == doctest::Approx(1.0));
    CHECK(same.second == doctest::Approx(1.0));

    const Tensor far = gaussian_samples(60, 500.0, 500.0, 1.0, 1.0, rng);
    const auto off = knn_precision_recall(real, far, 3);
    CHECK(off.first == doctest::Approx(0.0));
    CHECK(off.second == doctest::Approx(0.0));

    CHECK_THROWS_AS(knn_precision_recall(gaussian_samples(3, 0, 0, 1, 1, rng),
                                         real, 3),
                    std::invalid_argument);
}

TEST_CASE("knn precision/recall matches an exhaustive oracle on a small instance") {
    RngStream rng(11, "knn-small");
    const std::size_t n = 10, k = 2;
    const Tensor real = gaussian_samples(n, 0.0, 0.0, 1.0, 1.0, rng);
    const Tensor gen = gaussian_samples(n, 0.6, -0.2, 1.1, 0.8, rng);

    auto dist = [](const Tensor& x, std::size_t i, const Tensor& y, std::size_t j) {
        const double dx = x.at(i, 0) - y.at(j, 0);
        const double dy = x.at(i, 1) - y.at(j, 1);
        return std::sqrt(dx * dx + dy * dy);
    };
    // Oracle: k-th smallest positive distance per point, then membership count.
    auto oracle = [&](const Tensor& manifold, const Tensor& probes) {
        std::size_t inside = 0;
        for (std::size_t i = 0; i < probes.rows(); ++i) {
            bool in = false;
            for (std::size_t j = 0; j < manifold.rows() && !in; ++j) {
                std::vector<double> ds;
                for (std::size_t l = 0; l < manifold.rows(); ++l)
                    if (l != j) ds.push_back(dist(manifold, j, manifold, l));
                std::sort(ds.begin(), ds.end());
                in = dist(probes, i, manifold, j) <= ds[k - 1];
            }
            if (in) ++inside;
        }
        return static_cast<double>(inside) / static_cast<double>(probes.rows());
    };

    const auto [precision, recall] = knn_precision_recall(real, gen, k);
    CHECK(precision == doctest::Approx(oracle(real, gen)));
    CHECK(recall == doctest::Approx(oracle(gen, real)));
}

TEST_CASE("friedman reproduces the reference rank table") {
    const auto [statistic, p] = friedman(table_vi_ranks());
    CHECK(statistic == doctest::Approx(27.25).epsilon(0.0004));
    CHECK(p == doctest::Approx(0.00064).epsilon(0.08));

    RankTable tied;
    tied.methods = {"a", "b", "c"};
    tied.average_ranks = {2.0, 2.0, 2.0};
    tied.blocks = 6;
    const auto [s0, p0] = friedman(tied);
    CHECK(s0 == doctest::Approx(0.0));
    CHECK(p0 == doctest::Approx(1.0));

    RankTable two;
    two.methods = {"winner", "loser"};
    two.average_ranks = {1.0, 2.0};
    two.blocks = 10;
    CHECK(friedman(two).first == doctest::Approx(10.0));

    RankTable bad = table_vi_ranks();
    bad.average_ranks[0] = 0.5;
    CHECK_THROWS_AS(friedman(bad), std::invalid_argument);
}

TEST_CASE("friedman statistic is linear in the block count") {
    RankTable t = table_vi_ranks();
    const double s4 = friedman(t).first;
    t.blocks = 8;
    CHECK(friedman(t).first == doctest::Approx(2.0 * s4).epsilon(1e-12));
}

TEST_CASE("holm reproduces the reference z column and thresholds") {
    const RankTable t = table_vi_ranks();
    const auto comparisons = holm(t, 0, 0.05);
    REQUIRE(comparisons.size() == 8);

    const double expected_z[8] = {3.872983, 3.356586, 2.711088, 2.38834,
                                  2.130141, 1.420094, 1.161895, 0.387298};
    const char* expected_method[8] = {"DDPM", "DDIM", "CFDG",  "SDG",
                                      "ADM-G", "unCLIP", "GLIDE", "LDM"};
    const double expected_threshold[8] = {0.05 / 8, 0.05 / 7, 0.05 / 6, 0.05 / 5,
                                          0.05 / 4, 0.05 / 3, 0.05 / 2, 0.05};
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(comparisons[i].z == doctest::Approx(expected_z[i]).epsilon(1e-4));
        CHECK(t.methods[comparisons[i].method_index] ==
              std::string(expected_method[i]));
        CHECK(comparisons[i].threshold ==
              doctest::Approx(expected_threshold[i]).epsilon(1e-12));
        CHECK(comparisons[i].p ==
              doctest::Approx(std::erfc(expected_z[i] / std::sqrt(2.0)))
                  .epsilon(1e-6));
    }

    // Step-down with analytically correct p-values: the decision sequence is
    // monotone (once a comparison fails, everything after it fails too).
    bool alive = true;
    for (const auto& c : comparisons) {
        if (!c.reject) alive = false;
        CHECK(c.reject == (alive && c.p <= c.threshold));
    }

    CHECK_THROWS_AS(holm(t, 99, 0.05), std::invalid_argument);
}

TEST_CASE("holm z-values are anti-symmetric under control swap") {
    const RankTable t = table_vi_ranks();
    const auto from_dfs = holm(t, 0, 0.05);
    const auto from_ddpm = holm(t, 1, 0.05);
    double z_ddpm_vs_dfs = 0.0, z_dfs_vs_ddpm = 0.0;
    for (const auto& c : from_dfs)
        if (c.method_index == 1) z_ddpm_vs_dfs = c.z;
    for (const auto& c : from_ddpm)
        if (c.method_index == 0) z_dfs_vs_ddpm = c.z;
    CHECK(z_ddpm_vs_dfs == doctest::Approx(-z_dfs_vs_ddpm).epsilon(1e-12));
}

TEST_CASE("holm with two methods is a single z-test") {
    RankTable two;
    two.methods = {"control", "other"};
    two.average_ranks = {1.0, 2.0};
    two.blocks = 10;
    const auto comparisons = holm(two, 0, 0.05);
    REQUIRE(comparisons.size() == 1);
    CHECK(comparisons[0].threshold == doctest::Approx(0.05));
    const double se = std::sqrt(2.0 * 3.0 / (6.0 * 10.0));
    CHECK(comparisons[0].z == doctest::Approx(1.0 / se).epsilon(1e-12));
}

TEST_CASE("membership stability on constant and alternating traces") {
    std::vector<std::vector<double>> constant(12, {0.7, 0.2, 0.1});
    for (double s : membership_stability(constant, 0.25))
        CHECK(s == doctest::Approx(0.0));

    std::vector<std::vector<double>> alternating;
    for (int i = 0; i < 8; ++i) {
        alternating.push_back(i % 2 == 0 ? std::vector<double>{0.0, 1.0}
                                         : std::vector<double>{1.0, 0.0});
    }
    for (double s : membership_stability(alternating, 1.0))
        CHECK(s == doctest::Approx(0.5));

    CHECK_THROWS_AS(membership_stability({}, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(membership_stability(constant, 0.0), std::invalid_argument);
}
