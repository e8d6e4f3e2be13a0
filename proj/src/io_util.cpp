#include "dfs/io_util.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

namespace dfs {

namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

}  // namespace

std::string base64_encode(const std::uint8_t* data, std::size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        const std::uint32_t b0 = data[i];
        const std::uint32_t b1 = i + 1 < len ? data[i + 1] : 0;
        const std::uint32_t b2 = i + 2 < len ? data[i + 2] : 0;
        const std::uint32_t triple = (b0 << 16) | (b1 << 8) | b2;
        out.push_back(kAlphabet[(triple >> 18) & 0x3F]);
        out.push_back(kAlphabet[(triple >> 12) & 0x3F]);
        out.push_back(i + 1 < len ? kAlphabet[(triple >> 6) & 0x3F] : '=');
        out.push_back(i + 2 < len ? kAlphabet[triple & 0x3F] : '=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0)
        throw std::invalid_argument("base64: length not a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4] = {0, 0, 0, 0};
        int pad = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            const char c = text[i + j];
            if (c == '=') {
                ++pad;
                continue;
            }
            vals[j] = decode_char(c);
            if (vals[j] < 0 || pad > 0)
                throw std::invalid_argument("base64: invalid character");
        }
        const std::uint32_t triple = (static_cast<std::uint32_t>(vals[0]) << 18) |
                                     (static_cast<std::uint32_t>(vals[1]) << 12) |
                                     (static_cast<std::uint32_t>(vals[2]) << 6) |
                                     static_cast<std::uint32_t>(vals[3]);
        out.push_back(static_cast<std::uint8_t>((triple >> 16) & 0xFF));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((triple >> 8) & 0xFF));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(triple & 0xFF));
    }
    return out;
}

std::string base64_f64(const std::vector<double>& values) {
    std::vector<std::uint8_t> bytes(values.size() * 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::uint64_t bits = std::bit_cast<std::uint64_t>(values[i]);
        for (std::size_t b = 0; b < 8; ++b)
            bytes[i * 8 + b] = static_cast<std::uint8_t>((bits >> (8 * b)) & 0xFF);
    }
    return base64_encode(bytes.data(), bytes.size());
}

std::vector<double> f64_base64(const std::string& text) {
    const std::vector<std::uint8_t> bytes = base64_decode(text);
    if (bytes.size() % 8 != 0)
        throw std::invalid_argument("base64: payload is not an f64 array");
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t bits = 0;
        for (std::size_t b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
        out[i] = std::bit_cast<double>(bits);
    }
    return out;
}

}  // namespace dfs
