#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "tmis/dictionary.hpp"
#include "tmis/protocol.hpp"
#include "tmis/transcript.hpp"

namespace tmis {

/// Thrown when an attack step is attempted without its prerequisites.
class AttackError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything read out of a stolen card.
struct CardSecrets {
    Ciphertext nid;
    Digest y;
    Digest n;
    Digest v;
    HashAlgorithm hash = HashAlgorithm::sha256;
};

/// What the attacker has learned so far. Mutated only between attack steps.
struct AdversaryKnowledge {
    std::optional<CardSecrets> card_secrets;
    std::vector<LoginRequest> observed_requests;
    std::vector<LoginReply> observed_replies;
    std::optional<Digest> x_i;
    std::optional<Bytes> id_guess;
    std::optional<Digest> framed_sk;

    /// The card's hash designation, or SHA-256 when no card has been read.
    [[nodiscard]] HashAlgorithm hash() const;
};

/// Card read-out oracle (stands in for power analysis). Leaves the card untouched.
AdversaryKnowledge extract_card_secrets(const SmartCard& card);

/// Passive interception: appends the login requests and replies in
/// `transcript`, or only those of one session when `session` is given.
void eavesdrop(AdversaryKnowledge& knowledge, const Transcript& transcript,
               std::optional<std::uint64_t> session = std::nullopt);

/// X_i = Y_i xor V_i. Works because V_i == W_i on every card.
/// Throws AttackError without card secrets.
Digest derive_xi(AdversaryKnowledge& knowledge);

struct GuessResult {
    std::optional<Bytes> identity;
    std::optional<std::size_t> match_index;
    std::size_t candidates_tested = 0;
    /// Two different candidates both matched (a hash collision). The earlier one is returned.
    bool collision_anomaly = false;
};

/// Offline identity guessing against the first observed login request:
/// returns the first candidate ID* (in dictionary order) with
/// hash([ID*, X_i, r_u]) == a_i. Every candidate is tested so that a second
/// match can be flagged. `workers` == 0 means hardware concurrency.
/// On success stores the identity in knowledge.id_guess.
/// Throws AttackError without X_i or an observed request.
GuessResult guess_identity(AdversaryKnowledge& knowledge, const Dictionary& dict, unsigned workers = 0);

/// <NID, hash([ID, X_i, r_u*]), r_u*> with a fresh r_u*, reusing the first observed NID.
/// Throws AttackError unless X_i, id_guess and an observed request are all known.
LoginRequest forge_login(const AdversaryKnowledge& knowledge, Rng& rng);

/// SK = hash([ID, X_i, r_u, r_s]) framed from an intercepted request/reply pair.
/// Stores it in knowledge.framed_sk. Throws AttackError without X_i and id_guess.
Digest recover_session_key(AdversaryKnowledge& knowledge, const LoginRequest& req, const LoginReply& reply);

/// Unmasks NID* from a reply using the framed session key.
/// Throws AttackError without framed_sk and id_guess; EncodingError if the result is malformed.
Ciphertext unmask_next_nid(const AdversaryKnowledge& knowledge, const LoginReply& reply);

struct ForgedSession {
    SessionResult attacker;
    SessionResult server;
};

/// Plays the card's role with a forged request: sends it, frames SK from the
/// reply, unmasks NID* and answers with C_i. Each message is recorded in
/// `transcript`. Rejections are returned with the refusing checkpoint.
Outcome<ForgedSession> complete_forged_session(AdversaryKnowledge& knowledge, const LoginRequest& forged,
                                               const ServerState& server, Rng& server_rng,
                                               Transcript& transcript);

}  // namespace tmis
