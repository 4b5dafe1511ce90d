#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "tmis/bytes.hpp"
#include "tmis/primitives.hpp"

namespace tmis {

/// Seeded pseudorandom stream. Child streams are derived from the parent's
/// root by hashing in a label, so each actor draws from its own sequence and
/// the draws of one actor never shift another's.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent child stream; does not consume from this stream.
    [[nodiscard]] Rng derive(std::string_view label) const;
    [[nodiscard]] Rng derive(std::string_view label, std::uint64_t index) const;

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, bound). bound must be positive.
    std::uint64_t uniform(std::uint64_t bound);
    Bytes bytes(std::size_t n);

    template <typename Fixed>
    Fixed fixed() {
        const Bytes b = bytes(Fixed::size());
        return Fixed(b);
    }

    [[nodiscard]] const Digest& root() const { return root_; }

private:
    explicit Rng(const Digest& root);

    Digest root_;
    std::mt19937_64 engine_;
};

}  // namespace tmis
