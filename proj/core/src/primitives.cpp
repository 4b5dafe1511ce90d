#include "tmis/primitives.hpp"

#include <openssl/evp.h>

#include <memory>

namespace tmis {

namespace {

constexpr std::size_t kLengthPrefix = 4;
constexpr std::size_t kTagSize = 16;
constexpr std::uint8_t kPadMarker = 0x80;

const EVP_MD* evp_md(HashAlgorithm alg) {
    switch (alg) {
        case HashAlgorithm::sha256: return EVP_sha256();
        case HashAlgorithm::sha3_256: return EVP_sha3_256();
        case HashAlgorithm::blake2s_256: return EVP_blake2s256();
    }
    throw std::invalid_argument("unknown hash algorithm");
}

void append_be32(Bytes& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void append_field(Bytes& out, ByteView part) {
    if (part.size() > 0xffffffffu) throw EncodingError("field longer than 2^32-1 bytes");
    append_be32(out, static_cast<std::uint32_t>(part.size()));
    out.insert(out.end(), part.begin(), part.end());
}

struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

CipherCtx new_gcm_ctx(const CipherKey& key, const Iv& iv, bool encrypt) {
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx) throw CryptoError("EVP_CIPHER_CTX_new failed");
    const int enc = encrypt ? 1 : 0;
    if (EVP_CipherInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr, enc) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(Iv::size()),
                            nullptr) != 1 ||
        EVP_CipherInit_ex(ctx.get(), nullptr, nullptr, key.view().data(), iv.view().data(),
                          enc) != 1) {
        throw CryptoError("AES-256-GCM initialisation failed");
    }
    return ctx;
}

}  // namespace

std::string_view hash_algorithm_name(HashAlgorithm alg) {
    switch (alg) {
        case HashAlgorithm::sha256: return "sha256";
        case HashAlgorithm::sha3_256: return "sha3-256";
        case HashAlgorithm::blake2s_256: return "blake2s-256";
    }
    return "unknown";
}

HashAlgorithm parse_hash_algorithm(std::string_view name) {
    if (name == "sha256") return HashAlgorithm::sha256;
    if (name == "sha3-256") return HashAlgorithm::sha3_256;
    if (name == "blake2s-256") return HashAlgorithm::blake2s_256;
    throw std::invalid_argument("unknown hash algorithm: " + std::string(name));
}

FieldEncoding::FieldEncoding(std::initializer_list<ByteView> parts) {
    parts_.reserve(parts.size());
    for (ByteView p : parts) parts_.emplace_back(p.begin(), p.end());
}

Bytes FieldEncoding::encode() const {
    Bytes out;
    std::size_t total = 0;
    for (const auto& p : parts_) total += kLengthPrefix + p.size();
    out.reserve(total);
    for (const auto& p : parts_) append_field(out, p);
    return out;
}

FieldEncoding FieldEncoding::decode(ByteView data) {
    std::vector<Bytes> parts;
    std::size_t pos = 0;
    while (pos < data.size()) {
        if (data.size() - pos < kLengthPrefix) throw EncodingError("truncated length prefix");
        const std::size_t len = (std::size_t{data[pos]} << 24) | (std::size_t{data[pos + 1]} << 16) |
                                (std::size_t{data[pos + 2]} << 8) | std::size_t{data[pos + 3]};
        pos += kLengthPrefix;
        if (data.size() - pos < len) throw EncodingError("field overruns encoding");
        parts.emplace_back(data.begin() + static_cast<std::ptrdiff_t>(pos),
                           data.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
    }
    return FieldEncoding(std::move(parts));
}

Digest hash(std::span<const ByteView> parts, HashAlgorithm alg) {
    if (parts.empty()) throw EncodingError("hash of an empty part list");
    MdCtx ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestInit_ex(ctx.get(), evp_md(alg), nullptr) != 1) {
        throw CryptoError("digest initialisation failed");
    }
    for (ByteView p : parts) {
        if (p.empty()) throw EncodingError("hash part is empty");
        if (p.size() > 0xffffffffu) throw EncodingError("field longer than 2^32-1 bytes");
        const auto n = static_cast<std::uint32_t>(p.size());
        const std::uint8_t prefix[kLengthPrefix] = {
            static_cast<std::uint8_t>(n >> 24), static_cast<std::uint8_t>(n >> 16),
            static_cast<std::uint8_t>(n >> 8), static_cast<std::uint8_t>(n)};
        if (EVP_DigestUpdate(ctx.get(), prefix, kLengthPrefix) != 1 ||
            EVP_DigestUpdate(ctx.get(), p.data(), p.size()) != 1) {
            throw CryptoError("digest update failed");
        }
    }
    std::array<std::uint8_t, EVP_MAX_MD_SIZE> out{};
    unsigned int out_len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), out.data(), &out_len) != 1 || out_len != kDigestSize) {
        throw CryptoError("digest finalisation failed");
    }
    return Digest(ByteView(out.data(), out_len));
}

Digest hash(std::initializer_list<ByteView> parts, HashAlgorithm alg) {
    return hash(std::span<const ByteView>(parts.begin(), parts.size()), alg);
}

Bytes hash_expand(std::initializer_list<ByteView> parts, std::size_t length, HashAlgorithm alg) {
    std::vector<ByteView> framed(parts.begin(), parts.end());
    framed.emplace_back();
    Bytes out;
    out.reserve(length + kDigestSize);
    for (std::uint32_t counter = 0; out.size() < length; ++counter) {
        Bytes ctr;
        append_be32(ctr, counter);
        framed.back() = ctr;
        const Digest block = hash(framed, alg);
        out.insert(out.end(), block.view().begin(), block.view().end());
    }
    out.resize(length);
    return out;
}

Bytes xor_bytes(ByteView a, ByteView b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("xor_bytes length mismatch: " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
    }
    Bytes out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

Ciphertext::Ciphertext(Bytes bytes) : bytes_(std::move(bytes)) {
    if (bytes_.empty() || bytes_.size() % kBlockSize != 0) {
        throw EncodingError("ciphertext length must be a positive multiple of the block size");
    }
}

CipherKey derive_cipher_key(ByteView secret, HashAlgorithm alg) {
    return CipherKey(hash({secret}, alg).view());
}

Ciphertext sym_encrypt(const CipherKey& key, const FieldEncoding& plaintext, const IvPolicy& policy) {
    if (plaintext.size() != 2) throw EncodingError("plaintext must hold exactly (identity, R)");
    Bytes body = plaintext.encode();

    const Iv iv = std::visit(
        [&](const auto& p) -> Iv {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Iv>) {
                return p;
            } else {
                const Bytes label = to_bytes("sym-encrypt-iv");
                const Digest d = hash({label, key.view(), body});
                return Iv(d.view().first(Iv::size()));
            }
        },
        policy);

    // ISO/IEC 7816-4 padding keeps the ciphertext block-aligned.
    body.push_back(kPadMarker);
    while (body.size() % kBlockSize != 0) body.push_back(0);

    CipherCtx ctx = new_gcm_ctx(key, iv, true);
    Bytes out(Iv::size() + body.size() + kTagSize);
    std::copy(iv.view().begin(), iv.view().end(), out.begin());
    int len = 0;
    if (EVP_EncryptUpdate(ctx.get(), out.data() + Iv::size(), &len, body.data(),
                          static_cast<int>(body.size())) != 1 ||
        static_cast<std::size_t>(len) != body.size()) {
        throw CryptoError("AES-256-GCM encryption failed");
    }
    int final_len = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), out.data() + Iv::size() + len, &final_len) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(kTagSize),
                            out.data() + Iv::size() + body.size()) != 1) {
        throw CryptoError("AES-256-GCM finalisation failed");
    }
    return Ciphertext(std::move(out));
}

FieldEncoding sym_decrypt(const CipherKey& key, const Ciphertext& ct) {
    return sym_decrypt(key, ct.view());
}

FieldEncoding sym_decrypt(const CipherKey& key, ByteView ct) {
    if (ct.size() < Iv::size() + kBlockSize + kTagSize || ct.size() % kBlockSize != 0) {
        throw CryptoError("ciphertext truncated or misaligned");
    }
    const Iv iv(ct.first(Iv::size()));
    const ByteView body = ct.subspan(Iv::size(), ct.size() - Iv::size() - kTagSize);
    Bytes tag(ct.end() - static_cast<std::ptrdiff_t>(kTagSize), ct.end());

    CipherCtx ctx = new_gcm_ctx(key, iv, false);
    Bytes plain(body.size());
    int len = 0;
    if (EVP_DecryptUpdate(ctx.get(), plain.data(), &len, body.data(),
                          static_cast<int>(body.size())) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(kTagSize),
                            tag.data()) != 1) {
        throw CryptoError("AES-256-GCM decryption failed");
    }
    int final_len = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + len, &final_len) != 1) {
        throw CryptoError("authentication tag mismatch");
    }

    while (!plain.empty() && plain.back() == 0) plain.pop_back();
    if (plain.empty() || plain.back() != kPadMarker) throw CryptoError("malformed padding");
    plain.pop_back();

    try {
        FieldEncoding fields = FieldEncoding::decode(plain);
        if (fields.size() != 2) throw CryptoError("plaintext does not hold (identity, R)");
        return fields;
    } catch (const EncodingError& e) {
        throw CryptoError(std::string("malformed plaintext: ") + e.what());
    }
}

}  // namespace tmis
