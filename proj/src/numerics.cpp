#include "dfs/numerics.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

namespace dfs {

Tensor standard_normal(RngStream& rng, const std::vector<std::size_t>& shape) {
    if (shape.empty())
        throw std::invalid_argument("standard_normal: empty shape");
    for (std::size_t d : shape)
        if (d == 0) throw std::invalid_argument("standard_normal: zero-sized dimension");
    Tensor t = Tensor::zeros(shape);
    for (double& v : t.data) v = rng.next_normal();
    return t;
}

Latent normal_vector(RngStream& rng, std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("normal_vector: zero dimension");
    Latent v(dim);
    for (double& x : v) x = rng.next_normal();
    return v;
}

double dot(const Latent& a, const Latent& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Latent& a) { return std::sqrt(dot(a, a)); }

double cosine01(const Latent& a, const Latent& b) {
    check_same_shape(a, b, "cosine01");
    const double na = norm(a);
    const double nb = norm(b);
    if (na < 1e-12 || nb < 1e-12) return 0.5;
    double c = dot(a, b) / (na * nb);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return 0.5 * (1.0 + c);
}

std::vector<double> sym_psd_sqrt(const std::vector<double>& m, std::size_t n) {
    if (m.size() != n * n)
        throw std::invalid_argument("sym_psd_sqrt: not a square matrix");

    double max_abs = 0.0;
    double max_asym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            max_abs = std::max(max_abs, std::abs(m[i * n + j]));
            max_asym = std::max(max_asym, std::abs(m[i * n + j] - m[j * n + i]));
        }
    }
    if (max_asym > 1e-8 * std::max(1.0, max_abs))
        throw std::invalid_argument("sym_psd_sqrt: matrix not symmetric");

    Eigen::MatrixXd M(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                0.5 * (m[i * n + j] + m[j * n + i]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success)
        throw std::invalid_argument("sym_psd_sqrt: eigendecomposition failed");

    Eigen::VectorXd lam = es.eigenvalues();
    const double tol = 1e-10 * std::max(1.0, max_abs);
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < -tol)
            throw std::invalid_argument("sym_psd_sqrt: matrix is indefinite");
        lam(i) = lam(i) > 0.0 ? std::sqrt(lam(i)) : 0.0;
    }
    Eigen::MatrixXd S = es.eigenvectors() * lam.asDiagonal() *
                        es.eigenvectors().transpose();

    std::vector<double> out(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out[i * n + j] = 0.5 * (S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                                    S(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
    return out;
}

double chi2_sf(double x, unsigned df) {
    if (x < 0.0) throw std::invalid_argument("chi2_sf: negative statistic");
    if (df == 0) throw std::invalid_argument("chi2_sf: zero degrees of freedom");
    if (x == 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * static_cast<double>(df), 0.5 * x);
}

}  // namespace dfs
