#include "tmis/protocol.hpp"

#include "tmis/transcript.hpp"

namespace tmis {

namespace {

Digest xor_digest(const Digest& a, const Digest& b) { return Digest(xor_bytes(a.view(), b.view())); }

Rejection reject(Checkpoint at, std::string reason) { return Rejection{at, std::move(reason)}; }

}  // namespace

std::string_view checkpoint_name(Checkpoint c) {
    switch (c) {
        case Checkpoint::card_local_check: return "card_local_check";
        case Checkpoint::v1_nid_decryption: return "v1_nid_decryption";
        case Checkpoint::v1_authenticator: return "v1_authenticator";
        case Checkpoint::v3_server_tag: return "v3_server_tag";
        case Checkpoint::v4_confirmation: return "v4_confirmation";
    }
    return "unknown";
}

void Credentials::validate() const {
    if (id.empty()) throw std::invalid_argument("credentials: empty identity");
    if (password.empty()) throw std::invalid_argument("credentials: empty password");
    if (biometric.empty()) throw std::invalid_argument("credentials: empty biometric");
}

ServerState::ServerState(Bytes secret, HashAlgorithm alg)
    : secret_(std::move(secret)), cipher_key_(), alg_(alg) {
    if (secret_.empty()) throw std::invalid_argument("server secret must not be empty");
    cipher_key_ = derive_cipher_key(secret_, alg_);
}

ServerState ServerState::generate(Rng& rng, std::size_t secret_bytes, HashAlgorithm alg) {
    return ServerState(rng.bytes(secret_bytes), alg);
}

Digest ServerState::user_secret(ByteView id) const { return hash({id, secret_}, alg_); }

// Formulas.

Digest compute_w(ByteView id, ByteView password, const RegistrationRandom& r_i, HashAlgorithm alg) {
    return hash({id, password, r_i.view()}, alg);
}

Digest compute_authenticator(ByteView id, const Digest& x_i, const Nonce& r_u, HashAlgorithm alg) {
    return hash({id, x_i.view(), r_u.view()}, alg);
}

Digest compute_session_key(ByteView id, const Digest& x_i, const Nonce& r_u, const Nonce& r_s,
                           HashAlgorithm alg) {
    return hash({id, x_i.view(), r_u.view(), r_s.view()}, alg);
}

Digest compute_server_tag(ByteView id, const Ciphertext& nid, const Digest& sk,
                          const Ciphertext& nid_star, HashAlgorithm alg) {
    return hash({id, nid.view(), sk.view(), nid_star.view()}, alg);
}

Digest compute_confirmation(ByteView id, const Ciphertext& nid_star, const Digest& sk,
                            HashAlgorithm alg) {
    return hash({id, nid_star.view(), sk.view()}, alg);
}

Bytes nid_mask(const Digest& sk, ByteView id, std::size_t length, HashAlgorithm alg) {
    return hash_expand({sk.view(), id}, length, alg);
}

Ciphertext unmask_nid(ByteView masked_nid, const Digest& sk, ByteView id, HashAlgorithm alg) {
    return Ciphertext(xor_bytes(masked_nid, nid_mask(sk, id, masked_nid.size(), alg)));
}

// Registration.

UserRegistration begin_registration(const Credentials& creds, Rng& user_rng, HashAlgorithm alg) {
    creds.validate();
    const auto r_i = user_rng.fixed<RegistrationRandom>();
    return UserRegistration{RegistrationRequest{creds.id, compute_w(creds.id, creds.password, r_i, alg)},
                            r_i};
}

IssuedCard issue_card(const ServerState& server, const RegistrationRequest& request, Rng& server_rng) {
    if (request.id.empty()) throw std::invalid_argument("registration request without identity");
    const Digest x_i = server.user_secret(request.id);
    const auto r = server_rng.fixed<Nonce>();
    const auto iv = server_rng.fixed<Iv>();
    return IssuedCard{sym_encrypt(server.cipher_key(), FieldEncoding{request.id, r.view()}, iv),
                      xor_digest(x_i, request.w), server.hash_algorithm()};
}

SmartCard personalize_card(const IssuedCard& issued, const Credentials& creds,
                           const RegistrationRandom& r_i) {
    creds.validate();
    const Digest bio = hash({creds.biometric}, issued.hash);
    return SmartCard{issued.nid, issued.y, Digest(xor_bytes(r_i.view(), bio.view())),
                     compute_w(creds.id, creds.password, r_i, issued.hash), issued.hash};
}

SmartCard register_user(const Credentials& creds, const ServerState& server, Rng& rng) {
    const UserRegistration reg = begin_registration(creds, rng, server.hash_algorithm());
    const IssuedCard issued = issue_card(server, reg.request, rng);
    return personalize_card(issued, creds, reg.r_i);
}

// Login and validation.

Outcome<CardLogin> card_login(const SmartCard& card, const Credentials& creds, Rng& rng) {
    creds.validate();
    const HashAlgorithm alg = card.hash;
    const RegistrationRandom r_i(xor_bytes(card.n.view(), hash({creds.biometric}, alg).view()));
    const Digest w = compute_w(creds.id, creds.password, r_i, alg);
    if (w != card.v) {
        return reject(Checkpoint::card_local_check, "V_i does not match the entered credentials");
    }
    const Digest x_i = xor_digest(card.y, w);
    const auto r_u = rng.fixed<Nonce>();
    LoginRequest req{card.nid, compute_authenticator(creds.id, x_i, r_u, alg), r_u};
    return CardLogin{std::move(req), CardSession{creds.id, x_i, r_u, card.nid, alg}};
}

Outcome<ServerChallenge> server_validate(const ServerState& server, const LoginRequest& req, Rng& rng) {
    const HashAlgorithm alg = server.hash_algorithm();
    FieldEncoding identity;
    try {
        identity = sym_decrypt(server.cipher_key(), req.nid);
    } catch (const CryptoError& e) {
        return reject(Checkpoint::v1_nid_decryption, e.what());
    }
    const Bytes& id = identity[0];
    if (id.empty()) return reject(Checkpoint::v1_nid_decryption, "NID holds an empty identity");

    const Digest x_i = server.user_secret(id);
    if (compute_authenticator(id, x_i, req.r_u, alg) != req.a) {
        return reject(Checkpoint::v1_authenticator, "a_i does not verify");
    }

    const auto r_s = rng.fixed<Nonce>();
    const auto r_star = rng.fixed<Nonce>();
    const auto iv = rng.fixed<Iv>();
    const Digest sk = compute_session_key(id, x_i, req.r_u, r_s, alg);
    Ciphertext nid_star = sym_encrypt(server.cipher_key(), FieldEncoding{id, r_star.view()}, iv);
    const Digest tag = compute_server_tag(id, req.nid, sk, nid_star, alg);
    Bytes masked = xor_bytes(nid_star.view(), nid_mask(sk, id, nid_star.size(), alg));

    return ServerChallenge{LoginReply{r_s, tag, std::move(masked)},
                           PendingSession{id, req.nid, sk, std::move(nid_star), alg}};
}

Outcome<CardAcceptance> card_process_reply(const CardSession& session, const LoginReply& reply) {
    const HashAlgorithm alg = session.hash;
    const Digest sk = compute_session_key(session.id, session.x_i, session.r_u, reply.r_s, alg);
    Ciphertext nid_star;
    try {
        nid_star = unmask_nid(reply.masked_nid, sk, session.id, alg);
    } catch (const EncodingError& e) {
        return reject(Checkpoint::v3_server_tag, std::string("masked NID* malformed: ") + e.what());
    }
    if (compute_server_tag(session.id, session.nid, sk, nid_star, alg) != reply.auth_tag) {
        return reject(Checkpoint::v3_server_tag, "server tag does not verify");
    }
    SessionConfirm confirm{compute_confirmation(session.id, nid_star, sk, alg)};
    return CardAcceptance{confirm, SessionResult{true, sk, std::move(nid_star)}};
}

Outcome<SessionResult> server_confirm(const PendingSession& pending, const SessionConfirm& confirm) {
    if (compute_confirmation(pending.id, pending.nid_star, pending.sk, pending.hash) != confirm.c) {
        return reject(Checkpoint::v4_confirmation, "C_i does not verify");
    }
    return SessionResult{true, pending.sk, pending.nid_star};
}

Outcome<HonestSession> run_honest_session(const Credentials& creds, SmartCard& card,
                                          const ServerState& server, Rng& user_rng,
                                          Rng& server_rng, Transcript& transcript) {
    auto login = card_login(card, creds, user_rng);
    if (!login) return login.rejection();

    const std::uint64_t session = transcript.open_session();
    const std::size_t req_idx =
        transcript.record(session, Direction::user_to_server, login.value().request);
    auto challenge = server_validate(server, login.value().request, server_rng);
    if (!challenge) {
        transcript.resolve(req_idx, Status::rejected, challenge.rejection().at);
        return challenge.rejection();
    }
    transcript.resolve(req_idx, Status::accepted);

    const std::size_t reply_idx =
        transcript.record(session, Direction::server_to_user, challenge.value().reply);
    auto accepted = card_process_reply(login.value().session, challenge.value().reply);
    if (!accepted) {
        transcript.resolve(reply_idx, Status::rejected, accepted.rejection().at);
        return accepted.rejection();
    }
    transcript.resolve(reply_idx, Status::accepted);

    const std::size_t confirm_idx =
        transcript.record(session, Direction::user_to_server, accepted.value().confirm);
    auto confirmed = server_confirm(challenge.value().pending, accepted.value().confirm);
    if (!confirmed) {
        transcript.resolve(confirm_idx, Status::rejected, confirmed.rejection().at);
        return confirmed.rejection();
    }
    transcript.resolve(confirm_idx, Status::accepted);

    card.nid = *accepted.value().result.next_nid;
    return HonestSession{session, accepted.value().result, confirmed.value()};
}

}  // namespace tmis
