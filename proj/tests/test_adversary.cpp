#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>

#include "tmis/adversary.hpp"

using namespace tmis;

namespace {

// Victim, server and one eavesdropped honest session.
struct Scene {
    explicit Scene(std::uint64_t seed, std::string id = "+1-555-010-4477")
        : root(seed),
          server_rng(root.derive("server")),
          user_rng(root.derive("user")),
          attacker_rng(root.derive("adversary")),
          server(ServerState::generate(server_rng)),
          creds{to_bytes(id), to_bytes("s3cret-" + std::to_string(seed)), root.derive("bio").bytes(64)},
          card(register_user(creds, server, user_rng)),
          transcript([] { return std::int64_t{0}; }) {}

    HonestSession login() {
        auto s = run_honest_session(creds, card, server, user_rng, server_rng, transcript);
        EXPECT_TRUE(s);
        return s.value();
    }

    Dictionary dictionary(std::size_t size, std::optional<std::size_t> pos) {
        Rng r = root.derive("dict");
        return generate_dictionary(size, r, to_string(creds.id), pos);
    }

    Rng root;
    Rng server_rng;
    Rng user_rng;
    Rng attacker_rng;
    ServerState server;
    Credentials creds;
    SmartCard card;
    Transcript transcript;
};

// Stolen card plus one eavesdropped login, identity guessed.
AdversaryKnowledge full_knowledge(Scene& s) {
    s.login();
    AdversaryKnowledge k = extract_card_secrets(s.card);
    eavesdrop(k, s.transcript);
    derive_xi(k);
    guess_identity(k, s.dictionary(500, 250), 2);
    EXPECT_EQ(k.id_guess, s.creds.id);
    return k;
}

}  // namespace

TEST(ExtractCardSecrets, CopiesFieldsAndLeavesCardUntouched) {
    Scene s(1);
    const SmartCard before = s.card;
    const AdversaryKnowledge k = extract_card_secrets(s.card);
    ASSERT_TRUE(k.card_secrets);
    EXPECT_EQ(k.card_secrets->nid, s.card.nid);
    EXPECT_EQ(k.card_secrets->y, s.card.y);
    EXPECT_EQ(k.card_secrets->n, s.card.n);
    EXPECT_EQ(k.card_secrets->v, s.card.v);
    EXPECT_EQ(s.card, before);

    const AdversaryKnowledge empty;
    EXPECT_FALSE(empty.card_secrets);
}

TEST(DeriveXi, EqualsServerDerivedSecretForEveryCard) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Scene s(seed);
        AdversaryKnowledge k = extract_card_secrets(s.card);
        ASSERT_EQ(derive_xi(k), hash({s.creds.id, s.server.secret()})) << seed;
        ASSERT_EQ(k.x_i, s.server.user_secret(s.creds.id));
    }
}

TEST(DeriveXi, CorruptedVerifierGivesWrongValue) {
    Scene s(2);
    SmartCard tampered = s.card;
    tampered.v[0] ^= 0x01;
    AdversaryKnowledge k = extract_card_secrets(tampered);
    EXPECT_NE(derive_xi(k), s.server.user_secret(s.creds.id));
}

TEST(DeriveXi, NeedsCardSecrets) {
    AdversaryKnowledge k;
    EXPECT_THROW(derive_xi(k), AttackError);
}

TEST(Eavesdrop, FiltersBySession) {
    Scene s(3);
    const auto first = s.login();
    s.login();
    AdversaryKnowledge all, one;
    eavesdrop(all, s.transcript);
    eavesdrop(one, s.transcript, first.session);
    EXPECT_EQ(all.observed_requests.size(), 2u);
    EXPECT_EQ(all.observed_replies.size(), 2u);
    ASSERT_EQ(one.observed_requests.size(), 1u);
    EXPECT_EQ(one.observed_requests[0], s.transcript.login_requests()[0]);
}

TEST(GuessIdentity, FindsTargetAtRandomPosition) {
    Scene s(4);
    s.login();
    AdversaryKnowledge k = extract_card_secrets(s.card);
    eavesdrop(k, s.transcript);
    derive_xi(k);

    Rng pos_rng(4);
    const std::size_t pos = pos_rng.uniform(10'000);
    const Dictionary dict = s.dictionary(10'000, pos);
    const GuessResult g = guess_identity(k, dict, 4);
    ASSERT_TRUE(g.identity);
    EXPECT_EQ(*g.identity, s.creds.id);
    EXPECT_EQ(g.match_index, pos);
    EXPECT_EQ(g.candidates_tested, 10'000u);
    EXPECT_FALSE(g.collision_anomaly);
    EXPECT_EQ(k.id_guess, s.creds.id);
}

TEST(GuessIdentity, WorkerCountDoesNotChangeTheAnswer) {
    Scene s(5);
    s.login();
    AdversaryKnowledge k = extract_card_secrets(s.card);
    eavesdrop(k, s.transcript);
    derive_xi(k);
    const Dictionary dict = s.dictionary(997, 601);
    for (unsigned workers : {1u, 2u, 3u, 8u, 2000u}) {
        const GuessResult g = guess_identity(k, dict, workers);
        EXPECT_EQ(g.match_index, 601u) << workers;
    }
}

TEST(GuessIdentity, FirstMatchWinsAndDuplicatesAreNotCollisions) {
    Scene s(6);
    s.login();
    AdversaryKnowledge k = extract_card_secrets(s.card);
    eavesdrop(k, s.transcript);
    derive_xi(k);
    std::vector<Bytes> c = s.dictionary(100, std::nullopt).candidates();
    c[10] = s.creds.id;
    c[70] = s.creds.id;
    const GuessResult g = guess_identity(k, Dictionary(c), 3);
    EXPECT_EQ(g.match_index, 10u);
    EXPECT_FALSE(g.collision_anomaly);
}

TEST(GuessIdentity, NegativeControls) {
    Scene s(7);
    s.login();
    AdversaryKnowledge k = extract_card_secrets(s.card);
    eavesdrop(k, s.transcript);
    derive_xi(k);

    EXPECT_FALSE(guess_identity(k, s.dictionary(2'000, std::nullopt)).identity);
    EXPECT_FALSE(k.id_guess);

    // Random bytes in place of X_i: even the true identity fails.
    AdversaryKnowledge wrong = k;
    wrong.x_i = Rng(77).fixed<Digest>();
    EXPECT_FALSE(guess_identity(wrong, s.dictionary(2'000, 1'999)).identity);
}

TEST(GuessIdentity, MissingPrerequisitesThrow) {
    Scene s(8);
    s.login();
    const Dictionary dict = s.dictionary(10, 0);

    AdversaryKnowledge no_xi;
    eavesdrop(no_xi, s.transcript);
    EXPECT_THROW(guess_identity(no_xi, dict), AttackError);

    AdversaryKnowledge no_request = extract_card_secrets(s.card);
    derive_xi(no_request);
    EXPECT_THROW(guess_identity(no_request, dict), AttackError);
}

TEST(ForgeLogin, ServerAcceptsForgedRequest) {
    Scene s(9);
    AdversaryKnowledge k = full_knowledge(s);
    const LoginRequest forged = forge_login(k, s.attacker_rng);
    EXPECT_EQ(forged.nid, k.observed_requests.front().nid);
    EXPECT_NE(forged.r_u, k.observed_requests.front().r_u);
    EXPECT_TRUE(server_validate(s.server, forged, s.server_rng));
}

TEST(ForgeLogin, StaleNidStillAcceptedAfterRotation) {
    Scene s(10);
    AdversaryKnowledge k = full_knowledge(s);
    s.login();  // card rotates past the NID the attacker saw
    ASSERT_NE(s.card.nid, k.observed_requests.front().nid);
    EXPECT_TRUE(server_validate(s.server, forge_login(k, s.attacker_rng), s.server_rng));
}

TEST(ForgeLogin, WrongIdentityRejectedAndPrerequisitesEnforced) {
    Scene s(11);
    AdversaryKnowledge k = full_knowledge(s);
    AdversaryKnowledge wrong = k;
    wrong.id_guess = to_bytes("+1-555-000-0000");
    auto r = server_validate(s.server, forge_login(wrong, s.attacker_rng), s.server_rng);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.rejection().at, Checkpoint::v1_authenticator);

    AdversaryKnowledge no_id = k;
    no_id.id_guess.reset();
    EXPECT_THROW(forge_login(no_id, s.attacker_rng), AttackError);
    AdversaryKnowledge no_req = k;
    no_req.observed_requests.clear();
    EXPECT_THROW(forge_login(no_req, s.attacker_rng), AttackError);
}

TEST(RecoverSessionKey, MatchesBothPartiesAndUnmasksNextNid) {
    Scene s(12);
    s.login();
    AdversaryKnowledge k = extract_card_secrets(s.card);
    const HonestSession target = s.login();  // the session under attack
    eavesdrop(k, s.transcript, target.session);
    derive_xi(k);
    guess_identity(k, s.dictionary(300, 299));

    const Digest sk = recover_session_key(k, k.observed_requests.front(), k.observed_replies.front());
    EXPECT_EQ(sk, target.user.sk);
    EXPECT_EQ(sk, target.server.sk);
    EXPECT_EQ(k.framed_sk, sk);

    const Ciphertext nid_star = unmask_next_nid(k, k.observed_replies.front());
    EXPECT_EQ(nid_star, target.user.next_nid);
    EXPECT_EQ(sym_decrypt(s.server.cipher_key(), nid_star)[0], s.creds.id);
}

TEST(RecoverSessionKey, MismatchedSessionsGiveWrongKey) {
    Scene s(13);
    AdversaryKnowledge k = full_knowledge(s);
    const HonestSession second = s.login();
    AdversaryKnowledge later;
    eavesdrop(later, s.transcript, second.session);

    const Digest crossed = recover_session_key(k, k.observed_requests.front(), later.observed_replies.front());
    EXPECT_NE(crossed, second.user.sk);
    EXPECT_NE(crossed, *s.login().user.sk);

    AdversaryKnowledge none;
    EXPECT_THROW(recover_session_key(none, k.observed_requests.front(), k.observed_replies.front()), AttackError);
    EXPECT_THROW(unmask_next_nid(none, k.observed_replies.front()), AttackError);
}

TEST(CompleteForgedSession, ServerAcceptsAttackerAsVictim) {
    Scene s(11);
    AdversaryKnowledge k = full_knowledge(s);
    const std::size_t before = s.transcript.size();
    auto r = complete_forged_session(k, forge_login(k, s.attacker_rng), s.server, s.server_rng, s.transcript);
    ASSERT_TRUE(r);
    EXPECT_TRUE(r.value().server.accepted);
    EXPECT_EQ(r.value().attacker.sk, r.value().server.sk);
    ASSERT_EQ(s.transcript.size(), before + 3);
    for (std::size_t i = before; i < s.transcript.size(); ++i) {
        EXPECT_EQ(s.transcript.entries()[i].outcome, Status::accepted);
    }
}

TEST(CompleteForgedSession, PipelineBreaksWithoutItsInputs) {
    Scene s(14);
    s.login();
    AdversaryKnowledge k = extract_card_secrets(s.card);
    eavesdrop(k, s.transcript);
    derive_xi(k);
    EXPECT_FALSE(guess_identity(k, s.dictionary(200, std::nullopt)).identity);
    EXPECT_THROW(forge_login(k, s.attacker_rng), AttackError);

    AdversaryKnowledge deaf = extract_card_secrets(s.card);
    derive_xi(deaf);
    EXPECT_THROW(guess_identity(deaf, s.dictionary(200, 5)), AttackError);
}

TEST(Dictionary, ParsesLinesAndStripsTrailingWhitespace) {
    const Dictionary d = Dictionary::parse("alice\r\n\nbob  \n\tcarol\t\n  \n");
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d[0], to_bytes("alice"));
    EXPECT_EQ(d[1], to_bytes("bob"));
    EXPECT_EQ(d[2], to_bytes("\tcarol"));
    EXPECT_THROW(Dictionary::parse("\n \n"), std::runtime_error);
    EXPECT_THROW(Dictionary(std::vector<Bytes>{}), std::invalid_argument);
}

TEST(Dictionary, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "tmis_dict_test.txt";
    Rng rng(1);
    const Dictionary d = generate_dictionary(50, rng, "target@example.org", 3);
    d.save(path);
    const Dictionary back = Dictionary::load(path);
    EXPECT_EQ(back.candidates(), d.candidates());
    std::filesystem::remove(path);
    EXPECT_THROW(Dictionary::load(path), std::runtime_error);
}

TEST(Dictionary, GeneratorPlacesOrOmitsTarget) {
    Rng rng(2);
    const std::string target = "123-45-6789";
    const Dictionary with = generate_dictionary(1000, rng, target, 999);
    EXPECT_EQ(with[999], to_bytes(target));
    EXPECT_EQ(std::count(with.candidates().begin(), with.candidates().end(), to_bytes(target)), 1);
    EXPECT_EQ(with.contains_target(), true);

    const Dictionary without = generate_dictionary(1000, rng, target, std::nullopt);
    EXPECT_EQ(std::count(without.candidates().begin(), without.candidates().end(), to_bytes(target)), 0);
    EXPECT_THROW(generate_dictionary(10, rng, target, 10), std::invalid_argument);
    EXPECT_THROW(generate_dictionary(0, rng, target, std::nullopt), std::invalid_argument);
}

TEST(Dictionary, GeneratedIdentitiesLookRealistic) {
    const std::regex ssn(R"(\d{3}-\d{2}-\d{4})");
    const std::regex email(R"([a-z]+\.[a-z]+\d{4}@[a-z.]+)");
    const std::regex phone(R"(\+1-\d{3}-\d{3}-\d{4})");
    Rng rng(3);
    for (int i = 0; i < 300; ++i) {
        const std::string id = generate_identity(rng);
        EXPECT_TRUE(std::regex_match(id, ssn) || std::regex_match(id, email) || std::regex_match(id, phone)) << id;
    }
}
