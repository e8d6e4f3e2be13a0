#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace dfs {

// Counter-based deterministic random stream. A stream is identified by a
// 64-bit key derived from (seed, label chain); each draw hashes
// (key, counter) so draw i never depends on how draws 0..i-1 were consumed
// by other streams. Sub-streams forked with distinct labels are
// statistically independent and do not advance the parent.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::string_view label = {});

    // Derives an independent sub-stream; the parent is left untouched.
    RngStream fork(std::string_view label) const;
    RngStream fork(std::uint64_t index) const;

    std::uint64_t next_u64();
    // Uniform on [0, 1).
    double next_double();
    // Standard normal via Box-Muller (one value per two uniforms).
    double next_normal();
    // Uniform integer in [lo, hi], inclusive.
    std::uint64_t next_int(std::uint64_t lo, std::uint64_t hi);

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    // Fisher-Yates permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n);

private:
    RngStream(std::uint64_t key, std::uint64_t counter);

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace dfs
