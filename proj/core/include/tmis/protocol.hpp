#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "tmis/bytes.hpp"
#include "tmis/primitives.hpp"
#include "tmis/rng.hpp"

namespace tmis {

class Transcript;

struct RegistrationRandomTag {};
/// r_i. Sized like a digest because the card stores N = r_i xor H(B_i).
using RegistrationRandom = FixedBytes<kDigestSize, RegistrationRandomTag>;

/// Default long-term server secret: 1024 bits.
inline constexpr std::size_t kDefaultServerSecretBytes = 128;

struct Credentials {
    Bytes id;
    Bytes password;
    Bytes biometric;

    /// Throws std::invalid_argument if any field is empty.
    void validate() const;
};

/// Card contents after registration. The hash designation travels with the card.
struct SmartCard {
    Ciphertext nid;
    Digest y;
    Digest n;
    Digest v;
    HashAlgorithm hash = HashAlgorithm::sha256;

    friend bool operator==(const SmartCard&, const SmartCard&) = default;
};

class ServerState {
public:
    ServerState(Bytes secret, HashAlgorithm alg = HashAlgorithm::sha256);
    static ServerState generate(Rng& rng, std::size_t secret_bytes = kDefaultServerSecretBytes,
                                HashAlgorithm alg = HashAlgorithm::sha256);

    [[nodiscard]] const Bytes& secret() const { return secret_; }
    [[nodiscard]] const CipherKey& cipher_key() const { return cipher_key_; }
    [[nodiscard]] HashAlgorithm hash_algorithm() const { return alg_; }

    /// X_i = hash([id, x]).
    [[nodiscard]] Digest user_secret(ByteView id) const;

private:
    Bytes secret_;
    CipherKey cipher_key_;
    HashAlgorithm alg_;
};

// Wire messages.

struct LoginRequest {
    Ciphertext nid;
    Digest a;
    Nonce r_u;

    friend bool operator==(const LoginRequest&, const LoginRequest&) = default;
};

struct LoginReply {
    Nonce r_s;
    Digest auth_tag;
    Bytes masked_nid;

    friend bool operator==(const LoginReply&, const LoginReply&) = default;
};

struct SessionConfirm {
    Digest c;

    friend bool operator==(const SessionConfirm&, const SessionConfirm&) = default;
};

struct SessionResult {
    bool accepted = false;
    std::optional<Digest> sk;
    std::optional<Ciphertext> next_nid;
};

/// Where a run of the scheme stopped.
enum class Checkpoint {
    card_local_check,   // L1: V_i recomputation on the card
    v1_nid_decryption,  // V1: server decrypts NID
    v1_authenticator,   // V1: server recomputes a_i
    v3_server_tag,      // V3: card checks the server's tag
    v4_confirmation,    // V4: server checks C_i
};

std::string_view checkpoint_name(Checkpoint c);

struct Rejection {
    Checkpoint at;
    std::string reason;
};

/// Either a value or the checkpoint that refused it.
template <typename T>
class Outcome {
public:
    Outcome(T value) : state_(std::move(value)) {}
    Outcome(Rejection r) : state_(std::move(r)) {}

    [[nodiscard]] bool ok() const { return std::holds_alternative<T>(state_); }
    explicit operator bool() const { return ok(); }

    T& value() {
        if (!ok()) throw std::logic_error("Outcome holds a rejection: " + rejection().reason);
        return std::get<T>(state_);
    }
    const T& value() const {
        if (!ok()) throw std::logic_error("Outcome holds a rejection: " + rejection().reason);
        return std::get<T>(state_);
    }
    [[nodiscard]] const Rejection& rejection() const { return std::get<Rejection>(state_); }

private:
    std::variant<T, Rejection> state_;
};

// Registration, split by who computes what.

/// Step 1, computed by the user and sent over the secure channel.
struct RegistrationRequest {
    Bytes id;
    Digest w;  // W_i = hash([id, pw, r_i])
};

struct UserRegistration {
    RegistrationRequest request;
    RegistrationRandom r_i;  // stays with the user
};

/// Step 2 output: what the server embeds before handing the card over.
struct IssuedCard {
    Ciphertext nid;
    Digest y;
    HashAlgorithm hash = HashAlgorithm::sha256;
};

UserRegistration begin_registration(const Credentials& creds, Rng& user_rng,
                                    HashAlgorithm alg = HashAlgorithm::sha256);
IssuedCard issue_card(const ServerState& server, const RegistrationRequest& request, Rng& server_rng);
/// Step 3: the user writes N and V_i onto the card.
SmartCard personalize_card(const IssuedCard& issued, const Credentials& creds,
                           const RegistrationRandom& r_i);

/// Steps 1 to 3 in sequence, drawing r_i then R from `rng`.
SmartCard register_user(const Credentials& creds, const ServerState& server, Rng& rng);

// Login and validation.

/// Card-side state carried from L1 to V3.
struct CardSession {
    Bytes id;
    Digest x_i;
    Nonce r_u;
    Ciphertext nid;
    HashAlgorithm hash = HashAlgorithm::sha256;
};

struct CardLogin {
    LoginRequest request;
    CardSession session;
};

/// L1. Rejects at card_local_check when id, password or biometric is wrong.
Outcome<CardLogin> card_login(const SmartCard& card, const Credentials& creds, Rng& rng);

/// Server-side state carried from V2 to V4. The server keeps nothing else.
struct PendingSession {
    Bytes id;
    Ciphertext nid;
    Digest sk;
    Ciphertext nid_star;
    HashAlgorithm hash = HashAlgorithm::sha256;
};

struct ServerChallenge {
    LoginReply reply;
    PendingSession pending;
};

/// V1 and V2. No freshness check: any request whose a_i verifies is accepted.
Outcome<ServerChallenge> server_validate(const ServerState& server, const LoginRequest& req, Rng& rng);

struct CardAcceptance {
    SessionConfirm confirm;
    SessionResult result;
};

/// V3.
Outcome<CardAcceptance> card_process_reply(const CardSession& session, const LoginReply& reply);

/// V4.
Outcome<SessionResult> server_confirm(const PendingSession& pending, const SessionConfirm& confirm);

// The scheme's formulas, shared so every party frames fields identically.

Digest compute_w(ByteView id, ByteView password, const RegistrationRandom& r_i, HashAlgorithm alg);
Digest compute_authenticator(ByteView id, const Digest& x_i, const Nonce& r_u, HashAlgorithm alg);
Digest compute_session_key(ByteView id, const Digest& x_i, const Nonce& r_u, const Nonce& r_s,
                           HashAlgorithm alg);
Digest compute_server_tag(ByteView id, const Ciphertext& nid, const Digest& sk,
                          const Ciphertext& nid_star, HashAlgorithm alg);
Digest compute_confirmation(ByteView id, const Ciphertext& nid_star, const Digest& sk,
                            HashAlgorithm alg);
/// h(SK || ID_i) stretched to `length` bytes by counter-mode hashing.
Bytes nid_mask(const Digest& sk, ByteView id, std::size_t length, HashAlgorithm alg);
/// Inverse of the V2 masking. Throws EncodingError if the result is not a well-formed ciphertext.
Ciphertext unmask_nid(ByteView masked_nid, const Digest& sk, ByteView id, HashAlgorithm alg);

// Full honest run.

struct HonestSession {
    std::uint64_t session = 0;  // transcript session id
    SessionResult user;
    SessionResult server;
};

/// L1 through V4, recording each message in `transcript`. On success the
/// card's stored NID is replaced by NID*.
Outcome<HonestSession> run_honest_session(const Credentials& creds, SmartCard& card,
                                          const ServerState& server, Rng& user_rng,
                                          Rng& server_rng, Transcript& transcript);

}  // namespace tmis
