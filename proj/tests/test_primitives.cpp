#include <gtest/gtest.h>

#include <set>

#include "tmis/primitives.hpp"
#include "tmis/rng.hpp"

using namespace tmis;

namespace {

// Known answers computed with Python hashlib / cryptography over the same
// framing (4-byte big-endian length before every field).
constexpr char kHashAbC[] = "7abdea0c49b90a2a1a4ed23b0115638b2f3c7517c0d3373ab25f25728b8be165";
constexpr char kHashABc[] = "3aa71345508f5eaf0cfe4bf8ba3e5f49f3b1b17a431a3da38a9576a06ede94eb";
constexpr char kSha256Abc[] = "d04b72a650ce0f8ce4963330a53ee2832733d2baeffff3c1d8e256cca096d120";
constexpr char kSha3Abc[] = "de28586f082f31f719b989653eba3ea78381b2c0122ab529b39a5e9a6e22c38c";
constexpr char kBlake2sAbc[] = "ff2c97b0d8f2cef184c502b99356edbba754139d70ee1ab9dfa43af6caecbf17";
constexpr char kExpand48[] =
    "ab511e40214fc923d6e88c2c6a4bc0f976c2bcf0538108fb493123c969efcc5a0f4180c39d42e5b1556a9d6191c5cf30";
constexpr char kCipherKey[] = "070bd7f8460e35251b495a8b9fab6b811ddb69c583d90c80a22e32cd5ad94b93";
constexpr char kNidCiphertext[] =
    "404142434445464748494a4b4c4d4e4fee9ea45c301e1f106742b92caddb27f76dc44528bac0013e83dbe089ea35ec7c"
    "cc3d177cdf039b20d854ede415c46adec684a923b680c13883bdb7be132bde76d117c09dd8d5af4b8179833492eebd75";

Bytes counting(std::uint8_t from, std::size_t n) {
    Bytes b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>(from + i);
    return b;
}

const Bytes kServerSecret = counting(0, 128);
const Bytes kIdentity = to_bytes("alice.smith0042@example.org");

}  // namespace

TEST(Hash, MatchesIndependentlyComputedVectors) {
    EXPECT_EQ(hash({to_bytes("AB"), to_bytes("C")}).hex(), kHashAbC);
    EXPECT_EQ(hash({to_bytes("A"), to_bytes("BC")}).hex(), kHashABc);
    EXPECT_EQ(hash({to_bytes("abc")}).hex(), kSha256Abc);
    EXPECT_EQ(hash({to_bytes("abc")}, HashAlgorithm::sha3_256).hex(), kSha3Abc);
    EXPECT_EQ(hash({to_bytes("abc")}, HashAlgorithm::blake2s_256).hex(), kBlake2sAbc);
}

TEST(Hash, LengthFramingSeparatesSplitPoints) {
    EXPECT_NE(hash({to_bytes("AB"), to_bytes("C")}), hash({to_bytes("A"), to_bytes("BC")}));
    EXPECT_NE(hash({to_bytes("AB"), to_bytes("C")}), hash({to_bytes("ABC")}));
}

TEST(Hash, Deterministic) {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const Bytes a = rng.bytes(1 + rng.uniform(64));
        EXPECT_EQ(hash({a}), hash({a}));
    }
}

TEST(Hash, RejectsEmptyInput) {
    EXPECT_THROW(hash(std::span<const ByteView>{}), EncodingError);
    EXPECT_THROW(hash({to_bytes("a"), Bytes{}}), EncodingError);
}

TEST(Hash, AlgorithmNamesRoundTrip) {
    for (auto alg : {HashAlgorithm::sha256, HashAlgorithm::sha3_256, HashAlgorithm::blake2s_256}) {
        EXPECT_EQ(parse_hash_algorithm(hash_algorithm_name(alg)), alg);
    }
    EXPECT_THROW(parse_hash_algorithm("md5"), std::invalid_argument);
}

TEST(HashExpand, MatchesCounterModeVector) {
    const Bytes sk(32, 0xaa);
    EXPECT_EQ(to_hex(hash_expand({sk, to_bytes("alice")}, 48)), kExpand48);
    // A shorter expansion is a prefix of a longer one.
    const Bytes short_mask = hash_expand({sk, to_bytes("alice")}, 20);
    EXPECT_EQ(to_hex(short_mask), std::string(kExpand48).substr(0, 40));
}

TEST(FieldEncoding, InjectiveOverRandomPartLists) {
    Rng rng(99);
    std::set<Bytes> seen_encodings;
    std::set<std::vector<Bytes>> seen_lists;
    for (int i = 0; i < 2000; ++i) {
        std::vector<Bytes> parts(1 + rng.uniform(4));
        // Small alphabet and short lengths so that distinct lists often share concatenations.
        for (auto& p : parts) {
            p = rng.bytes(1 + rng.uniform(i % 2 == 0 ? 3 : 64));
            for (auto& c : p) c &= 0x01;
        }
        const Bytes enc = FieldEncoding(parts).encode();
        const bool new_list = seen_lists.insert(parts).second;
        const bool new_enc = seen_encodings.insert(enc).second;
        EXPECT_EQ(new_list, new_enc);
        EXPECT_EQ(FieldEncoding::decode(enc).parts(), parts);
    }
}

TEST(FieldEncoding, DecodeRejectsMalformedInput) {
    EXPECT_THROW(FieldEncoding::decode(Bytes{0, 0, 0}), EncodingError);
    EXPECT_THROW(FieldEncoding::decode(Bytes{0, 0, 0, 5, 'a'}), EncodingError);
    EXPECT_TRUE(FieldEncoding::decode(Bytes{}).parts().empty());
}

TEST(XorBytes, BitwiseDefinitionAndLaws) {
    EXPECT_EQ(xor_bytes(Bytes{0x0f}, Bytes{0xf0}), Bytes{0xff});

    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 1 + rng.uniform(48);
        const Bytes a = rng.bytes(n), b = rng.bytes(n), c = rng.bytes(n);
        const Bytes zeros(n, 0);
        EXPECT_EQ(xor_bytes(a, a), zeros);
        EXPECT_EQ(xor_bytes(a, zeros), a);
        EXPECT_EQ(xor_bytes(a, b), xor_bytes(b, a));
        EXPECT_EQ(xor_bytes(xor_bytes(a, b), c), xor_bytes(a, xor_bytes(b, c)));
        EXPECT_EQ(xor_bytes(xor_bytes(a, b), b), a);
    }
}

TEST(XorBytes, LengthMismatchThrows) {
    EXPECT_THROW(xor_bytes(Bytes{1, 2}, Bytes{1}), std::invalid_argument);
}

TEST(SymCipher, KeyDerivationAndCiphertextMatchVectors) {
    const CipherKey key = derive_cipher_key(kServerSecret);
    EXPECT_EQ(key.hex(), kCipherKey);

    const Iv iv(counting(0x40, 16));
    const Bytes r(16, 0x5a);
    const Ciphertext ct = sym_encrypt(key, FieldEncoding{kIdentity, r}, iv);
    EXPECT_EQ(ct.hex(), kNidCiphertext);
    EXPECT_EQ(ct.size() % kBlockSize, 0u);

    const FieldEncoding back = sym_decrypt(key, ct);
    EXPECT_EQ(back[0], kIdentity);
    EXPECT_EQ(back[1], r);
}

TEST(SymCipher, RoundTripOverRandomTriples) {
    Rng rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const auto key = rng.fixed<CipherKey>();
        const Bytes id = rng.bytes(1 + rng.uniform(40));
        const Bytes r = rng.bytes(kNonceSize);
        const Ciphertext ct = sym_encrypt(key, FieldEncoding{id, r}, rng.fixed<Iv>());
        ASSERT_EQ(ct.size() % kBlockSize, 0u);
        const FieldEncoding back = sym_decrypt(key, ct);
        ASSERT_EQ(back[0], id);
        ASSERT_EQ(back[1], r);
    }
}

TEST(SymCipher, WrongKeyFails) {
    Rng rng(1);
    const auto k1 = rng.fixed<CipherKey>();
    const auto k2 = rng.fixed<CipherKey>();
    ASSERT_NE(k1, k2);
    const Ciphertext ct = sym_encrypt(k1, FieldEncoding{kIdentity, rng.bytes(16)}, rng.fixed<Iv>());
    EXPECT_THROW(sym_decrypt(k2, ct), CryptoError);
}

TEST(SymCipher, DistinctRandomnessGivesDistinctCiphertexts) {
    Rng rng(2);
    const auto key = rng.fixed<CipherKey>();
    const Ciphertext a = sym_encrypt(key, FieldEncoding{kIdentity, rng.bytes(16)}, rng.fixed<Iv>());
    const Ciphertext b = sym_encrypt(key, FieldEncoding{kIdentity, rng.bytes(16)}, rng.fixed<Iv>());
    EXPECT_NE(a, b);
}

TEST(SymCipher, DeterministicIvPolicy) {
    Rng rng(8);
    const auto key = rng.fixed<CipherKey>();
    const FieldEncoding pt{kIdentity, rng.bytes(16)};
    EXPECT_EQ(sym_encrypt(key, pt, DeterministicIv{}), sym_encrypt(key, pt, DeterministicIv{}));
    EXPECT_EQ(sym_decrypt(key, sym_encrypt(key, pt, DeterministicIv{})), pt);
}

TEST(SymCipher, TamperingAndTruncationFail) {
    Rng rng(4);
    const auto key = rng.fixed<CipherKey>();
    const Ciphertext ct = sym_encrypt(key, FieldEncoding{kIdentity, rng.bytes(16)}, rng.fixed<Iv>());

    for (std::size_t pos : {std::size_t{0}, ct.size() / 2, ct.size() - 1}) {
        Bytes flipped = ct.bytes();
        flipped[pos] ^= 0x01;
        EXPECT_THROW(sym_decrypt(key, flipped), CryptoError) << "byte " << pos;
    }
    Bytes truncated = ct.bytes();
    truncated.resize(truncated.size() - kBlockSize);
    EXPECT_THROW(sym_decrypt(key, truncated), CryptoError);
    EXPECT_THROW(sym_decrypt(key, Bytes(5, 0)), CryptoError);
}

TEST(SymCipher, RejectsWrongPlaintextShape) {
    Rng rng(6);
    const auto key = rng.fixed<CipherKey>();
    EXPECT_THROW(sym_encrypt(key, FieldEncoding{kIdentity}, DeterministicIv{}), EncodingError);
    EXPECT_THROW(Ciphertext(Bytes(17, 0)), EncodingError);
}

TEST(Rng, DerivedStreamsAreIndependentAndReproducible) {
    const Rng root(42);
    Rng a1 = root.derive("user");
    Rng a2 = root.derive("user");
    Rng b = root.derive("server");
    EXPECT_EQ(a1.bytes(32), a2.bytes(32));
    EXPECT_NE(root.derive("user").bytes(32), b.bytes(32));
    EXPECT_NE(root.derive("trial", 0).bytes(8), root.derive("trial", 1).bytes(8));

    Rng u(1);
    for (int i = 0; i < 1000; ++i) EXPECT_LT(u.uniform(7), 7u);
    EXPECT_THROW(u.uniform(0), std::invalid_argument);
}

TEST(Hex, RoundTripAndErrors) {
    EXPECT_EQ(to_hex(Bytes{0x00, 0xab, 0xff}), "00abff");
    EXPECT_EQ(from_hex("00ABff"), (Bytes{0x00, 0xab, 0xff}));
    EXPECT_THROW(from_hex("abc"), std::invalid_argument);
    EXPECT_THROW(from_hex("zz"), std::invalid_argument);
}
