#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

namespace dfs {

// Shortest round-trip decimal form, stable across runs.
inline std::string format_double(double v) {
    char buf[32];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

// Base64 (RFC 4648) over the little-endian bytes of an f64 array.
std::string base64_f64(const std::vector<double>& values);
std::vector<double> f64_base64(const std::string& text);

std::string base64_encode(const std::uint8_t* data, std::size_t len);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace dfs
