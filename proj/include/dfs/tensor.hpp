#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfs {

// Latent feature vectors are plain flat arrays of doubles.
using Latent = std::vector<double>;

// Dense row-major tensor. No broadcasting; shape is fixed at construction.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, std::vector<double> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (numel(shape) != data.size())
            throw std::invalid_argument("tensor: shape/data size mismatch");
    }

    static std::size_t numel(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return n;
    }

    static Tensor zeros(std::vector<std::size_t> shape) {
        std::size_t n = numel(shape);
        return Tensor(std::move(shape), std::vector<double>(n, 0.0));
    }

    std::size_t size() const { return data.size(); }

    // 2-D accessors for n-by-d sample matrices.
    std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
    std::size_t cols() const { return shape.size() > 1 ? shape[1] : 1; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

    Latent row(std::size_t r) const {
        return Latent(data.begin() + static_cast<std::ptrdiff_t>(r * cols()),
                      data.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols()));
    }
};

inline void check_same_shape(const Latent& a, const Latent& b, const char* who) {
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(who) + ": shape mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
}

}  // namespace dfs
