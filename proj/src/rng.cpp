#include "dfs/rng.hpp"

#include <cmath>
#include <numbers>

namespace dfs {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t hash_label(std::string_view label) {
    // FNV-1a over the label bytes, finalized through mix64.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x00000100000001B3ULL;
    }
    return mix64(h);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view label)
    : key_(mix64(mix64(seed + kGolden) ^ hash_label(label))), counter_(0) {}

RngStream::RngStream(std::uint64_t key, std::uint64_t counter)
    : key_(key), counter_(counter) {}

RngStream RngStream::fork(std::string_view label) const {
    return RngStream(mix64(key_ ^ hash_label(label)), 0);
}

RngStream RngStream::fork(std::uint64_t index) const {
    return RngStream(mix64(key_ ^ mix64(index + kGolden)), 0);
}

std::uint64_t RngStream::next_u64() {
    return mix64(key_ + kGolden * ++counter_);
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
    // u1 in (0, 1] so the log is finite.
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RngStream::next_int(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    // Fixed-point multiply keeps the draw branch-free and reproducible.
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next_u64()) * span;
    return lo + static_cast<std::uint64_t>(wide >> 64);
}

std::vector<std::size_t> RngStream::permutation(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(next_int(0, i - 1));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

}  // namespace dfs
