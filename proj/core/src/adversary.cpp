#include "tmis/adversary.hpp"

#include <algorithm>
#include <thread>

namespace tmis {

HashAlgorithm AdversaryKnowledge::hash() const {
    return card_secrets ? card_secrets->hash : HashAlgorithm::sha256;
}

AdversaryKnowledge extract_card_secrets(const SmartCard& card) {
    AdversaryKnowledge k;
    k.card_secrets = CardSecrets{card.nid, card.y, card.n, card.v, card.hash};
    return k;
}

void eavesdrop(AdversaryKnowledge& knowledge, const Transcript& transcript,
               std::optional<std::uint64_t> session) {
    for (const auto& e : transcript.entries()) {
        if (session && e.session != *session) continue;
        if (const auto* req = std::get_if<LoginRequest>(&e.message)) {
            knowledge.observed_requests.push_back(*req);
        } else if (const auto* reply = std::get_if<LoginReply>(&e.message)) {
            knowledge.observed_replies.push_back(*reply);
        }
    }
}

Digest derive_xi(AdversaryKnowledge& knowledge) {
    if (!knowledge.card_secrets) throw AttackError("derive_xi: no card secrets");
    const Digest x_i(xor_bytes(knowledge.card_secrets->y.view(), knowledge.card_secrets->v.view()));
    knowledge.x_i = x_i;
    return x_i;
}

namespace {

struct ShardResult {
    std::optional<std::size_t> first;
    std::optional<std::size_t> second;  // first match whose bytes differ from `first`
};

// Candidates [begin, end), scanned in order.
ShardResult scan(const std::vector<Bytes>& cands, std::size_t begin, std::size_t end, const Digest& x_i,
                 const LoginRequest& req, HashAlgorithm alg) {
    ShardResult r;
    for (std::size_t i = begin; i < end; ++i) {
        if (cands[i].empty()) continue;
        if (compute_authenticator(cands[i], x_i, req.r_u, alg) != req.a) continue;
        if (!r.first) {
            r.first = i;
        } else if (!r.second && cands[i] != cands[*r.first]) {
            r.second = i;
        }
    }
    return r;
}

}  // namespace

GuessResult guess_identity(AdversaryKnowledge& knowledge, const Dictionary& dict, unsigned workers) {
    if (!knowledge.x_i) throw AttackError("guess_identity: X_i not derived");
    if (knowledge.observed_requests.empty()) throw AttackError("guess_identity: no observed login request");

    const LoginRequest& anchor = knowledge.observed_requests.front();
    const Digest x_i = *knowledge.x_i;
    const HashAlgorithm alg = knowledge.hash();
    const auto& cands = dict.candidates();

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t shards = std::min<std::size_t>(workers, cands.size());
    const std::size_t chunk = (cands.size() + shards - 1) / shards;

    std::vector<ShardResult> results(shards);
    {
        std::vector<std::jthread> threads;
        threads.reserve(shards);
        for (std::size_t s = 0; s < shards; ++s) {
            const std::size_t begin = s * chunk;
            const std::size_t end = std::min(cands.size(), begin + chunk);
            threads.emplace_back([&, s, begin, end] { results[s] = scan(cands, begin, end, x_i, anchor, alg); });
        }
    }

    GuessResult out;
    out.candidates_tested = cands.size();
    for (const auto& r : results) {
        for (auto idx : {r.first, r.second}) {
            if (!idx) continue;
            if (!out.match_index) {
                out.match_index = idx;
            } else if (cands[*idx] != cands[*out.match_index]) {
                out.collision_anomaly = true;
            }
        }
    }
    if (out.match_index) {
        out.identity = cands[*out.match_index];
        knowledge.id_guess = out.identity;
    }
    return out;
}

LoginRequest forge_login(const AdversaryKnowledge& knowledge, Rng& rng) {
    if (!knowledge.x_i) throw AttackError("forge_login: X_i not derived");
    if (!knowledge.id_guess) throw AttackError("forge_login: identity not known");
    if (knowledge.observed_requests.empty()) throw AttackError("forge_login: no observed NID");
    const auto r_u = rng.fixed<Nonce>();
    return LoginRequest{knowledge.observed_requests.front().nid,
                        compute_authenticator(*knowledge.id_guess, *knowledge.x_i, r_u, knowledge.hash()), r_u};
}

Digest recover_session_key(AdversaryKnowledge& knowledge, const LoginRequest& req, const LoginReply& reply) {
    if (!knowledge.x_i) throw AttackError("recover_session_key: X_i not derived");
    if (!knowledge.id_guess) throw AttackError("recover_session_key: identity not known");
    const Digest sk = compute_session_key(*knowledge.id_guess, *knowledge.x_i, req.r_u, reply.r_s, knowledge.hash());
    knowledge.framed_sk = sk;
    return sk;
}

Ciphertext unmask_next_nid(const AdversaryKnowledge& knowledge, const LoginReply& reply) {
    if (!knowledge.framed_sk) throw AttackError("unmask_next_nid: no framed session key");
    if (!knowledge.id_guess) throw AttackError("unmask_next_nid: identity not known");
    return unmask_nid(reply.masked_nid, *knowledge.framed_sk, *knowledge.id_guess, knowledge.hash());
}

Outcome<ForgedSession> complete_forged_session(AdversaryKnowledge& knowledge, const LoginRequest& forged,
                                               const ServerState& server, Rng& server_rng,
                                               Transcript& transcript) {
    if (!knowledge.x_i || !knowledge.id_guess) {
        throw AttackError("complete_forged_session: X_i and identity required");
    }
    const std::uint64_t session = transcript.open_session();
    const std::size_t req_idx = transcript.record(session, Direction::user_to_server, forged);
    auto challenge = server_validate(server, forged, server_rng);
    if (!challenge) {
        transcript.resolve(req_idx, Status::rejected, challenge.rejection().at);
        return challenge.rejection();
    }
    transcript.resolve(req_idx, Status::accepted);

    const LoginReply& reply = challenge.value().reply;
    const std::size_t reply_idx = transcript.record(session, Direction::server_to_user, reply);
    const Digest sk = recover_session_key(knowledge, forged, reply);
    const HashAlgorithm alg = knowledge.hash();
    const Ciphertext nid_star = unmask_next_nid(knowledge, reply);
    // The attacker checks the server tag too, exactly as a card would.
    if (compute_server_tag(*knowledge.id_guess, forged.nid, sk, nid_star, alg) != reply.auth_tag) {
        transcript.resolve(reply_idx, Status::rejected, Checkpoint::v3_server_tag);
        return Rejection{Checkpoint::v3_server_tag, "framed key does not match the server tag"};
    }
    transcript.resolve(reply_idx, Status::accepted);

    const SessionConfirm confirm{compute_confirmation(*knowledge.id_guess, nid_star, sk, alg)};
    const std::size_t confirm_idx = transcript.record(session, Direction::user_to_server, confirm);
    auto confirmed = server_confirm(challenge.value().pending, confirm);
    if (!confirmed) {
        transcript.resolve(confirm_idx, Status::rejected, confirmed.rejection().at);
        return confirmed.rejection();
    }
    transcript.resolve(confirm_idx, Status::accepted);

    return ForgedSession{SessionResult{true, sk, nid_star}, confirmed.value()};
}

}  // namespace tmis
