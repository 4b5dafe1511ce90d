#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tmis/bytes.hpp"

namespace tmis {

// Hash output, cipher key and IV sizes are fixed for every supported suite.
inline constexpr std::size_t kDigestSize = 32;
inline constexpr std::size_t kCipherKeySize = 32;
inline constexpr std::size_t kBlockSize = 16;
inline constexpr std::size_t kNonceSize = 16;

struct DigestTag {};
struct CipherKeyTag {};
struct NonceTag {};
struct IvTag {};

using Digest = FixedBytes<kDigestSize, DigestTag>;
using CipherKey = FixedBytes<kCipherKeySize, CipherKeyTag>;
/// Protocol randomness: r_i, R, R*, r_u and r_s are all 16 bytes.
using Nonce = FixedBytes<kNonceSize, NonceTag>;
using Iv = FixedBytes<kBlockSize, IvTag>;

class EncodingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CryptoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The single hash used for both h(.) and H(.). All choices produce 32-byte digests.
enum class HashAlgorithm { sha256, sha3_256, blake2s_256 };

std::string_view hash_algorithm_name(HashAlgorithm alg);
/// Throws std::invalid_argument for unknown names.
HashAlgorithm parse_hash_algorithm(std::string_view name);

/// Ordered list of byte-string fields. Each field is written as a 4-byte
/// big-endian length followed by its bytes, so the encoding is injective.
class FieldEncoding {
public:
    FieldEncoding() = default;
    explicit FieldEncoding(std::vector<Bytes> parts) : parts_(std::move(parts)) {}
    FieldEncoding(std::initializer_list<ByteView> parts);

    [[nodiscard]] const std::vector<Bytes>& parts() const { return parts_; }
    [[nodiscard]] std::size_t size() const { return parts_.size(); }
    [[nodiscard]] const Bytes& operator[](std::size_t i) const { return parts_.at(i); }

    [[nodiscard]] Bytes encode() const;
    /// Throws EncodingError unless `data` is exactly a sequence of well-formed fields.
    static FieldEncoding decode(ByteView data);

    friend bool operator==(const FieldEncoding&, const FieldEncoding&) = default;

private:
    std::vector<Bytes> parts_;
};

/// hash(parts) = Hash(encode(parts)). Throws EncodingError on an empty list or an empty part.
Digest hash(std::span<const ByteView> parts, HashAlgorithm alg = HashAlgorithm::sha256);
Digest hash(std::initializer_list<ByteView> parts, HashAlgorithm alg = HashAlgorithm::sha256);

/// Counter-mode expansion: hash([parts..., be32(0)]) || hash([parts..., be32(1)]) || ...
/// truncated to `length` bytes.
Bytes hash_expand(std::initializer_list<ByteView> parts, std::size_t length,
                  HashAlgorithm alg = HashAlgorithm::sha256);

/// Throws std::invalid_argument when the lengths differ.
Bytes xor_bytes(ByteView a, ByteView b);

/// Output of sym_encrypt: IV || AES-256-GCM body || tag, always a positive multiple of 16 bytes.
class Ciphertext {
public:
    Ciphertext() = default;
    /// Throws EncodingError if `bytes` is empty or not block-aligned.
    explicit Ciphertext(Bytes bytes);

    [[nodiscard]] ByteView view() const { return bytes_; }
    [[nodiscard]] const Bytes& bytes() const { return bytes_; }
    [[nodiscard]] std::size_t size() const { return bytes_.size(); }
    [[nodiscard]] std::string hex() const { return to_hex(bytes_); }

    friend bool operator==(const Ciphertext&, const Ciphertext&) = default;

private:
    Bytes bytes_;
};

struct DeterministicIv {};
using IvPolicy = std::variant<DeterministicIv, Iv>;

/// Server cipher key: hash([secret]). Lets the long-term secret be any length.
CipherKey derive_cipher_key(ByteView secret, HashAlgorithm alg = HashAlgorithm::sha256);

/// Encrypts a two-field plaintext (identity, R). Throws EncodingError for any other shape.
Ciphertext sym_encrypt(const CipherKey& key, const FieldEncoding& plaintext, const IvPolicy& iv);

/// Throws CryptoError on a wrong key, tampering, truncation or malformed padding.
FieldEncoding sym_decrypt(const CipherKey& key, const Ciphertext& ct);
FieldEncoding sym_decrypt(const CipherKey& key, ByteView ct);

}  // namespace tmis
