#include <doctest.h>

#include <cmath>
#include <vector>

#include "dfs/numerics.hpp"
#include "dfs/rng.hpp"

using namespace dfs;

namespace {

double frobenius(const std::vector<double>& m) {
    double s = 0.0;
    for (double v : m) s += v * v;
    return std::sqrt(s);
}

std::vector<double> square(const std::vector<double>& m, std::size_t n) {
    std::vector<double> out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                out[i * n + j] += m[i * n + k] * m[k * n + j];
    return out;
}

}  // namespace

TEST_CASE("cosine01 basics") {
    CHECK(cosine01({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
    CHECK(cosine01({1, 0}, {-1, 0}) == doctest::Approx(0.0));
    CHECK(cosine01({1, 0}, {0, 1}) == doctest::Approx(0.5));
    CHECK(cosine01({0, 0}, {1, 1}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(cosine01({1, 2}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("cosine01 is symmetric and scale-invariant") {
    RngStream rng(31, "cosine");
    for (int trial = 0; trial < 200; ++trial) {
        const Latent a = normal_vector(rng, 5);
        const Latent b = normal_vector(rng, 5);
        const double lam = 0.1 + 10.0 * rng.next_double();
        Latent a_scaled = a;
        for (double& v : a_scaled) v *= lam;
        CHECK(cosine01(a, b) == doctest::Approx(cosine01(b, a)).epsilon(1e-12));
        CHECK(cosine01(a_scaled, b) == doctest::Approx(cosine01(a, b)).epsilon(1e-9));
        const double c = cosine01(a, b);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
    }
}

TEST_CASE("sym_psd_sqrt on diagonal and identity") {
    const auto id = sym_psd_sqrt({1, 0, 0, 0, 1, 0, 0, 0, 1}, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(id[i * 3 + j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));

    const auto d = sym_psd_sqrt({4, 0, 0, 9}, 2);
    CHECK(d[0] == doctest::Approx(2.0));
    CHECK(d[3] == doctest::Approx(3.0));
    CHECK(d[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sym_psd_sqrt reconstructs a random PSD matrix") {
    RngStream rng(11, "psd");
    const std::size_t n = 5;
    // M = A^T A is PSD by construction.
    std::vector<double> a(n * n);
    for (double& v : a) v = rng.next_normal();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                m[i * n + j] += a[k * n + i] * a[k * n + j];

    const auto s = sym_psd_sqrt(m, n);
    const auto ss = square(s, n);
    std::vector<double> diff(n * n);
    for (std::size_t i = 0; i < n * n; ++i) diff[i] = ss[i] - m[i];
    CHECK(frobenius(diff) <= 1e-8 * frobenius(m));

    // S commutes with M (shared eigenbasis).
    std::vector<double> sm(n * n, 0.0), ms(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) {
                sm[i * n + j] += s[i * n + k] * m[k * n + j];
                ms[i * n + j] += m[i * n + k] * s[k * n + j];
            }
    for (std::size_t i = 0; i < n * n; ++i)
        CHECK(sm[i] == doctest::Approx(ms[i]).epsilon(1e-8).scale(frobenius(m)));
}

TEST_CASE("sym_psd_sqrt rejects bad input") {
    CHECK_THROWS_AS(sym_psd_sqrt({1, 2, 3, 4}, 2), std::invalid_argument);   // asymmetric
    CHECK_THROWS_AS(sym_psd_sqrt({-1, 0, 0, -2}, 2), std::invalid_argument); // indefinite
    CHECK_THROWS_AS(sym_psd_sqrt({1, 2, 3}, 2), std::invalid_argument);      // not square
}

TEST_CASE("chi2_sf reference values") {
    CHECK(chi2_sf(0.0, 1) == doctest::Approx(1.0));
    CHECK(chi2_sf(0.0, 17) == doctest::Approx(1.0));
    // df=2 closed form: exp(-x/2).
    CHECK(chi2_sf(1.386294, 2) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(chi2_sf(27.25, 8) == doctest::Approx(0.000636).epsilon(0.008));
    CHECK_THROWS_AS(chi2_sf(-1.0, 3), std::invalid_argument);
}

TEST_CASE("chi2_sf agrees with a series oracle for even df") {
    // For even df, Q(df/2, x/2) = exp(-x/2) * sum_{k<df/2} (x/2)^k / k!.
    for (unsigned df : {2u, 4u, 8u, 12u}) {
        for (double x : {0.5, 3.0, 10.0, 27.25}) {
            double term = 1.0, sum = 1.0;
            for (unsigned k = 1; k < df / 2; ++k) {
                term *= (x / 2.0) / static_cast<double>(k);
                sum += term;
            }
            const double oracle = std::exp(-x / 2.0) * sum;
            CHECK(chi2_sf(x, df) == doctest::Approx(oracle).epsilon(1e-9));
        }
    }
}
