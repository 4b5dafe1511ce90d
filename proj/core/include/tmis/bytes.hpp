#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tmis {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline std::string to_string(ByteView b) { return std::string(b.begin(), b.end()); }

std::string to_hex(ByteView b);

// Accepts upper or lower case; throws std::invalid_argument on odd length or a non-hex digit.
Bytes from_hex(std::string_view hex);

// Fixed-length byte string. The tag keeps digests, keys and nonces from being mixed up.
template <std::size_t N, typename Tag>
class FixedBytes {
public:
    static constexpr std::size_t size_bytes = N;

    FixedBytes() { bytes_.fill(0); }

    explicit FixedBytes(ByteView b) {
        if (b.size() != N) {
            throw std::invalid_argument("expected " + std::to_string(N) + " bytes, got " +
                                        std::to_string(b.size()));
        }
        std::copy(b.begin(), b.end(), bytes_.begin());
    }

    [[nodiscard]] ByteView view() const { return bytes_; }
    [[nodiscard]] Bytes to_vector() const { return Bytes(bytes_.begin(), bytes_.end()); }
    [[nodiscard]] std::string hex() const { return to_hex(bytes_); }
    [[nodiscard]] static constexpr std::size_t size() { return N; }

    std::uint8_t& operator[](std::size_t i) { return bytes_[i]; }
    const std::uint8_t& operator[](std::size_t i) const { return bytes_[i]; }

    friend bool operator==(const FixedBytes&, const FixedBytes&) = default;
    friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;

private:
    std::array<std::uint8_t, N> bytes_;
};

}  // namespace tmis
