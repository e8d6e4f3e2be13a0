#include "dfs/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dfs/numerics.hpp"

namespace dfs {

namespace {

std::vector<double> column_means(const Tensor& x) {
    std::vector<double> mu(x.cols(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) mu[c] += x.at(r, c);
    for (double& v : mu) v /= static_cast<double>(x.rows());
    return mu;
}

// Unbiased covariance with a small ridge for near-degenerate sets.
std::vector<double> covariance(const Tensor& x, const std::vector<double>& mu) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    std::vector<double> cov(d * d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = x.at(r, i) - mu[i];
            for (std::size_t j = i; j < d; ++j)
                cov[i * d + j] += xi * (x.at(r, j) - mu[j]);
        }
    }
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            cov[i * d + j] /= denom;
            cov[j * d + i] = cov[i * d + j];
        }
    for (std::size_t i = 0; i < d; ++i) cov[i * d + i] += 1e-6;
    return cov;
}

std::vector<double> matmul(const std::vector<double>& a,
                           const std::vector<double>& b, std::size_t n) {
    std::vector<double> out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i * n + k];
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aik * b[k * n + j];
        }
    return out;
}

double stddev_population(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double v : xs) mean += v;
    mean /= n;
    double s = 0.0;
    for (double v : xs) s += (v - mean) * (v - mean);
    return std::sqrt(s / n);
}

double normal_two_sided_p(double z) {
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace

double gaussian_frechet(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("gaussian_frechet: dimension mismatch");
    if (a.rows() < 2 || b.rows() < 2)
        throw std::invalid_argument("gaussian_frechet: need at least 2 samples");
    const std::size_t d = a.cols();

    const std::vector<double> mu_a = column_means(a);
    const std::vector<double> mu_b = column_means(b);
    const std::vector<double> cov_a = covariance(a, mu_a);
    const std::vector<double> cov_b = covariance(b, mu_b);

    double mean_term = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = mu_a[i] - mu_b[i];
        mean_term += diff * diff;
    }

    const std::vector<double> sqrt_a = sym_psd_sqrt(cov_a, d);
    const std::vector<double> inner = matmul(matmul(sqrt_a, cov_b, d), sqrt_a, d);
    const std::vector<double> cross = sym_psd_sqrt(inner, d);

    double trace_term = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        trace_term += cov_a[i * d + i] + cov_b[i * d + i] - 2.0 * cross[i * d + i];

    return std::max(0.0, mean_term + trace_term);
}

double wasserstein2_1d(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("wasserstein2_1d: empty input");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // Piecewise-constant quantile functions; integrate over merged segments.
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    std::size_t i = 0, j = 0;
    double pos = 0.0, total = 0.0;
    while (i < na && j < nb) {
        const double next_a = static_cast<double>(i + 1) / static_cast<double>(na);
        const double next_b = static_cast<double>(j + 1) / static_cast<double>(nb);
        const double next = std::min(next_a, next_b);
        const double diff = a[i] - b[j];
        total += diff * diff * (next - pos);
        pos = next;
        if (next_a <= next) ++i;
        if (next_b <= next) ++j;
    }
    return total;
}

double sliced_w2(const Tensor& a, const Tensor& b, std::size_t n_projections,
                 RngStream& rng) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("sliced_w2: dimension mismatch");
    if (n_projections == 0)
        throw std::invalid_argument("sliced_w2: need at least one projection");
    const std::size_t d = a.cols();

    double acc = 0.0;
    std::vector<double> pa(a.rows()), pb(b.rows());
    for (std::size_t p = 0; p < n_projections; ++p) {
        Latent dir = normal_vector(rng, d);
        double n = norm(dir);
        while (n < 1e-12) {
            dir = normal_vector(rng, d);
            n = norm(dir);
        }
        for (double& v : dir) v /= n;
        for (std::size_t r = 0; r < a.rows(); ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += dir[c] * a.at(r, c);
            pa[r] = s;
        }
        for (std::size_t r = 0; r < b.rows(); ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += dir[c] * b.at(r, c);
            pb[r] = s;
        }
        acc += wasserstein2_1d(pa, pb);
    }
    return static_cast<double>(d) * acc / static_cast<double>(n_projections);
}

double psnr(const Latent& a, const Latent& b, double peak) {
    check_same_shape(a, b, "psnr");
    if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Latent& a, const Latent& b, std::size_t height,
            std::size_t width, std::size_t window, double peak) {
    check_same_shape(a, b, "ssim");
    if (a.size() != height * width)
        throw std::invalid_argument("ssim: data does not match height*width");
    if (window == 0 || height < window || width < window)
        throw std::invalid_argument("ssim: inputs smaller than window");

    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    const double nw = static_cast<double>(window * window);

    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t y = 0; y + window <= height; ++y) {
        for (std::size_t x = 0; x + window <= width; ++x) {
            double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
            for (std::size_t dy = 0; dy < window; ++dy)
                for (std::size_t dx = 0; dx < window; ++dx) {
                    const double va = a[(y + dy) * width + (x + dx)];
                    const double vb = b[(y + dy) * width + (x + dx)];
                    sa += va;
                    sb += vb;
                    saa += va * va;
                    sbb += vb * vb;
                    sab += va * vb;
                }
            const double mu_a = sa / nw;
            const double mu_b = sb / nw;
            const double var_a = saa / nw - mu_a * mu_a;
            const double var_b = sbb / nw - mu_b * mu_b;
            const double cov = sab / nw - mu_a * mu_b;
            acc += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                   ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

std::pair<double, double> knn_precision_recall(const Tensor& real,
                                               const Tensor& gen,
                                               std::size_t k) {
    if (real.cols() != gen.cols())
        throw std::invalid_argument("knn_precision_recall: dimension mismatch");
    if (k == 0 || real.rows() < k + 1 || gen.rows() < k + 1)
        throw std::invalid_argument("knn_precision_recall: too few samples");

    auto sq_dist = [](const Tensor& x, std::size_t i, const Tensor& y,
                      std::size_t j) {
        double s = 0.0;
        for (std::size_t c = 0; c < x.cols(); ++c) {
            const double d = x.at(i, c) - y.at(j, c);
            s += d * d;
        }
        return s;
    };

    // Radius of each point's k-th nearest neighbour within its own set.
    auto radii = [&](const Tensor& x) {
        std::vector<double> r(x.rows());
        std::vector<double> d(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t j = 0; j < x.rows(); ++j) d[j] = sq_dist(x, i, x, j);
            d[i] = std::numeric_limits<double>::infinity();
            std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1),
                             d.end());
            r[i] = d[k - 1];
        }
        return r;
    };

    auto coverage = [&](const Tensor& manifold, const std::vector<double>& r,
                        const Tensor& probes) {
        std::size_t inside = 0;
        for (std::size_t i = 0; i < probes.rows(); ++i) {
            for (std::size_t j = 0; j < manifold.rows(); ++j) {
                if (sq_dist(probes, i, manifold, j) <= r[j]) {
                    ++inside;
                    break;
                }
            }
        }
        return static_cast<double>(inside) / static_cast<double>(probes.rows());
    };

    const std::vector<double> real_r = radii(real);
    const std::vector<double> gen_r = radii(gen);
    return {coverage(real, real_r, gen), coverage(gen, gen_r, real)};
}

std::pair<double, double> friedman(const RankTable& ranks) {
    const std::size_t k = ranks.average_ranks.size();
    if (k < 2) throw std::invalid_argument("friedman: need at least 2 methods");
    if (ranks.blocks < 2) throw std::invalid_argument("friedman: need at least 2 blocks");
    for (double r : ranks.average_ranks)
        if (r < 1.0 || r > static_cast<double>(k))
            throw std::invalid_argument("friedman: rank outside [1, k]");

    const double kk = static_cast<double>(k);
    const double n = static_cast<double>(ranks.blocks);
    const double center = (kk + 1.0) / 2.0;
    double ss = 0.0;
    for (double r : ranks.average_ranks) ss += (r - center) * (r - center);
    const double statistic = 12.0 * n / (kk * (kk + 1.0)) * ss;
    return {statistic, chi2_sf(statistic, static_cast<unsigned>(k - 1))};
}

std::vector<HolmComparison> holm(const RankTable& ranks,
                                 std::size_t control_index, double alpha) {
    const std::size_t k = ranks.average_ranks.size();
    if (control_index >= k)
        throw std::invalid_argument("holm: control index out of range");
    if (k < 2) throw std::invalid_argument("holm: need at least 2 methods");

    const double se = std::sqrt(static_cast<double>(k) * (static_cast<double>(k) + 1.0) /
                                (6.0 * static_cast<double>(ranks.blocks)));

    std::vector<HolmComparison> out;
    for (std::size_t i = 0; i < k; ++i) {
        if (i == control_index) continue;
        HolmComparison c;
        c.method_index = i;
        c.z = (ranks.average_ranks[i] - ranks.average_ranks[control_index]) / se;
        c.p = normal_two_sided_p(c.z);
        out.push_back(c);
    }

    std::sort(out.begin(), out.end(), [](const HolmComparison& x, const HolmComparison& y) {
        return std::abs(x.z) > std::abs(y.z);
    });

    const std::size_t m = out.size();
    bool alive = true;
    for (std::size_t i = 0; i < m; ++i) {
        out[i].threshold = alpha / static_cast<double>(m - i);
        if (alive && out[i].p <= out[i].threshold) {
            out[i].reject = true;
        } else {
            alive = false;
            out[i].reject = false;
        }
    }
    return out;
}

std::vector<double> membership_stability(
    const std::vector<std::vector<double>>& trace, double tail_fraction) {
    if (trace.empty())
        throw std::invalid_argument("membership_stability: empty trace");
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
        throw std::invalid_argument("membership_stability: tail_fraction outside (0, 1]");

    const std::size_t steps = trace.size();
    const std::size_t paths = trace.front().size();
    const std::size_t tail = std::min(
        steps, static_cast<std::size_t>(
                   std::ceil(tail_fraction * static_cast<double>(steps))));

    std::vector<double> out(paths);
    for (std::size_t p = 0; p < paths; ++p) {
        std::vector<double> xs;
        xs.reserve(tail);
        for (std::size_t s = steps - tail; s < steps; ++s) xs.push_back(trace[s][p]);
        out[p] = stddev_population(xs);
    }
    return out;
}

}  // namespace dfs
