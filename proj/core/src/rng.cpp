#include "tmis/rng.hpp"

#include <array>
#include <limits>
#include <stdexcept>
#include <string>

namespace tmis {

namespace {

Bytes be64(std::uint64_t v) {
    Bytes out(8);
    for (int i = 7; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
        v >>= 8;
    }
    return out;
}

std::seed_seq seed_from(const Digest& root) {
    std::array<std::uint32_t, kDigestSize / 4> words{};
    for (std::size_t i = 0; i < words.size(); ++i) {
        words[i] = (std::uint32_t{root[4 * i]} << 24) | (std::uint32_t{root[4 * i + 1]} << 16) |
                   (std::uint32_t{root[4 * i + 2]} << 8) | std::uint32_t{root[4 * i + 3]};
    }
    return std::seed_seq(words.begin(), words.end());
}

}  // namespace

Rng::Rng(std::uint64_t seed) : Rng(hash({to_bytes("tmis-rng-root"), be64(seed)})) {}

Rng::Rng(const Digest& root) : root_(root) {
    std::seed_seq seq = seed_from(root_);
    engine_.seed(seq);
}

Rng Rng::derive(std::string_view label) const {
    return Rng(hash({root_.view(), to_bytes(label)}));
}

Rng Rng::derive(std::string_view label, std::uint64_t index) const {
    return Rng(hash({root_.view(), to_bytes(label), be64(index)}));
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform bound must be positive");
    // Rejection sampling keeps the result identical across standard libraries.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
}

Bytes Rng::bytes(std::size_t n) {
    Bytes out(n);
    std::size_t i = 0;
    while (i < n) {
        std::uint64_t w = engine_();
        for (int k = 0; k < 8 && i < n; ++k, ++i) {
            out[i] = static_cast<std::uint8_t>(w);
            w >>= 8;
        }
    }
    return out;
}

}  // namespace tmis
