#include "tmis/scenario.hpp"

#include <algorithm>
#include <chrono>

#include <nlohmann/json.hpp>

#include "tmis/adversary.hpp"
#include "tmis/dictionary.hpp"

namespace tmis {

using nlohmann::json;

void ScenarioConfig::validate() const {
    if (trials == 0) throw UsageError("--trials must be at least 1");
    if (dictionary_size == 0) throw UsageError("--dict-size must be at least 1");
    if (server_secret_bytes == 0) throw UsageError("server secret length must be positive");
    if (!dictionary_path && target_position && *target_position >= dictionary_size) {
        throw UsageError("--target-pos must be smaller than --dict-size");
    }
}

void AttackReport::finalize() {
    success = !steps.empty() &&
              std::all_of(steps.begin(), steps.end(), [](const ReportStep& s) { return s.success; });
}

std::string AttackReport::to_json() const {
    json j_steps = json::array();
    for (const auto& s : steps) {
        j_steps.push_back({{"name", s.name},
                           {"outcome", s.success ? "success" : "failure"},
                           {"elapsed_ms", s.elapsed_ms},
                           {"detail", s.detail},
                           {"messages", s.messages}});
    }
    json j = {{"scenario", scenario},
              {"success", success},
              {"steps", j_steps},
              {"recovered_values", recovered_values},
              {"metrics", metrics},
              {"notes", notes},
              {"anomalies", anomalies}};
    return j.dump();
}

namespace {

void strip(json& j) {
    if (j.is_object()) {
        j.erase("received_at");
        j.erase("elapsed_ms");
        for (auto& [_, v] : j.items()) strip(v);
    } else if (j.is_array()) {
        for (auto& v : j) strip(v);
    }
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double lap_ms() {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - start_).count();
        start_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// Aggregates one named step over all trials.
class Tally {
public:
    bool record(const std::string& name, bool ok, double ms, std::vector<std::size_t> msgs = {},
                std::string failure = {}) {
        auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
        if (it == entries_.end()) it = entries_.insert(entries_.end(), Entry{name, 0, 0, 0.0, {}, {}});
        ++it->seen;
        if (ok) ++it->ok;
        it->ms += ms;
        it->msgs.insert(it->msgs.end(), msgs.begin(), msgs.end());
        if (!ok && it->failure.empty()) it->failure = std::move(failure);
        return ok;
    }

    void emit(AttackReport& report, std::size_t trials) const {
        for (const auto& e : entries_) {
            std::string detail = std::to_string(e.ok) + "/" + std::to_string(trials) + " trials";
            if (!e.failure.empty()) detail += "; first failure: " + e.failure;
            report.steps.push_back(ReportStep{e.name, e.ok == trials, e.ms, std::move(detail), e.msgs});
        }
    }

private:
    struct Entry {
        std::string name;
        std::size_t ok = 0;
        std::size_t seen = 0;
        double ms = 0.0;
        std::vector<std::size_t> msgs;
        std::string failure;
    };
    std::vector<Entry> entries_;
};

std::vector<std::size_t> index_range(std::size_t from, std::size_t to) {
    std::vector<std::size_t> out;
    for (std::size_t i = from; i < to; ++i) out.push_back(i);
    return out;
}

struct Trial {
    Credentials creds;
    ServerState server;
    SmartCard card;
    Rng user_rng;
    Rng server_rng;
    Rng adversary_rng;
    Rng dictionary_rng;
};

Trial make_trial(const ScenarioConfig& cfg, std::uint64_t index, const std::optional<std::string>& identity) {
    const Rng root = Rng(cfg.seed).derive("trial", index);
    Rng cred_rng = root.derive("credentials");
    const std::string id = identity ? *identity : generate_identity(cred_rng);
    Credentials creds{to_bytes(id), to_bytes("pw-" + to_hex(cred_rng.bytes(6))), cred_rng.bytes(64)};

    Rng server_rng = root.derive("server");
    Rng user_rng = root.derive("user");
    ServerState server = ServerState::generate(server_rng, cfg.server_secret_bytes, cfg.hash);
    const UserRegistration reg = begin_registration(creds, user_rng, cfg.hash);
    const IssuedCard issued = issue_card(server, reg.request, server_rng);
    SmartCard card = personalize_card(issued, creds, reg.r_i);
    return Trial{std::move(creds),      std::move(server),       std::move(card), std::move(user_rng),
                 std::move(server_rng), root.derive("adversary"), root.derive("dictionary")};
}

// Source of candidate identities for the attack scenarios.
class DictionarySource {
public:
    explicit DictionarySource(const ScenarioConfig& cfg) : cfg_(cfg) {
        if (cfg.dictionary_path) {
            try {
                file_.emplace(Dictionary::load(*cfg.dictionary_path));
            } catch (const std::runtime_error& e) {
                throw UsageError(e.what());
            }
            if (cfg.target_position && *cfg.target_position >= file_->size()) {
                throw UsageError("--target-pos must be smaller than the dictionary length");
            }
        }
    }

    // Victim identity for a trial, or nullopt to let the trial generate one.
    std::optional<std::string> victim_identity(std::uint64_t trial) const {
        if (!file_) return std::nullopt;
        if (!cfg_.exclude_target) {
            return to_string((*file_)[cfg_.target_position.value_or(file_->size() - 1)]);
        }
        Rng rng = Rng(cfg_.seed).derive("victim-outside-dictionary", trial);
        for (;;) {
            std::string id = generate_identity(rng);
            const auto& c = file_->candidates();
            if (std::find(c.begin(), c.end(), to_bytes(id)) == c.end()) return id;
        }
    }

    Dictionary for_trial(Trial& t) const {
        if (file_) {
            Dictionary d = *file_;
            d.set_contains_target(!cfg_.exclude_target);
            return d;
        }
        std::optional<std::size_t> pos;
        if (!cfg_.exclude_target) pos = cfg_.target_position.value_or(cfg_.dictionary_size - 1);
        return generate_dictionary(cfg_.dictionary_size, t.dictionary_rng, to_string(t.creds.id), pos);
    }

    [[nodiscard]] std::string describe() const {
        return cfg_.dictionary_path ? "file:" + cfg_.dictionary_path->string() : "generated";
    }

private:
    const ScenarioConfig& cfg_;
    std::optional<Dictionary> file_;
};

// State carried through the stolen-card pipeline of one trial.
struct AttackTrial {
    AdversaryKnowledge knowledge;
    std::optional<HonestSession> honest;
    std::size_t first_message = 0;
    std::size_t end_message = 0;
};

// Register, eavesdrop one honest login, steal the card, derive X_i, guess the
// identity. Returns nullopt as soon as a step fails.
std::optional<AttackTrial> stolen_card_pipeline(Trial& t, const DictionarySource& dicts, const ScenarioConfig& cfg,
                                                Transcript& transcript, Tally& tally, AttackReport& report,
                                                bool first_trial) {
    AttackTrial a;
    Stopwatch sw;

    a.first_message = transcript.size();
    auto honest = run_honest_session(t.creds, t.card, t.server, t.user_rng, t.server_rng, transcript);
    a.end_message = transcript.size();
    const auto msgs = index_range(a.first_message, a.end_message);
    if (!tally.record("eavesdrop_login", honest.ok(), sw.lap_ms(), msgs,
                      honest.ok() ? "" : honest.rejection().reason)) {
        return std::nullopt;
    }
    a.honest = honest.value();
    eavesdrop(a.knowledge, transcript, a.honest->session);

    a.knowledge.card_secrets = extract_card_secrets(t.card).card_secrets;
    tally.record("steal_card", true, sw.lap_ms());

    const Digest x_i = derive_xi(a.knowledge);
    if (!tally.record("derive_xi", x_i == t.server.user_secret(t.creds.id), sw.lap_ms(), {},
                      "Y_i xor V_i differs from hash([ID, x])")) {
        return std::nullopt;
    }

    const Dictionary dict = dicts.for_trial(t);
    sw.lap_ms();
    const GuessResult guess = guess_identity(a.knowledge, dict, cfg.workers);
    const bool found = guess.identity && *guess.identity == t.creds.id;
    report.metrics["dictionary_size"] = static_cast<std::int64_t>(dict.size());
    report.metrics["candidates_tested"] += static_cast<std::int64_t>(guess.candidates_tested);
    if (guess.collision_anomaly) {
        report.anomalies.push_back("hash collision between dictionary candidates in trial " +
                                   std::to_string(report.metrics["trials_run"]));
    }
    if (first_trial) {
        report.recovered_values["x_i"] = x_i.hex();
        if (guess.identity) {
            report.recovered_values["id"] = to_hex(*guess.identity);
            report.notes["identity"] = to_string(*guess.identity);
        }
        if (guess.match_index) report.metrics["match_index"] = static_cast<std::int64_t>(*guess.match_index);
    }
    if (!tally.record("guess_identity", found, sw.lap_ms(), {a.first_message},
                      guess.identity ? "recovered a wrong identity" : "no candidate matched a_i")) {
        return std::nullopt;
    }
    return a;
}

AttackReport start_report(std::string name, const ScenarioConfig& cfg) {
    AttackReport r;
    r.scenario = std::move(name);
    r.metrics["seed"] = static_cast<std::int64_t>(cfg.seed);
    r.metrics["trials"] = static_cast<std::int64_t>(cfg.trials);
    r.notes["hash"] = std::string(hash_algorithm_name(cfg.hash));
    return r;
}

template <typename PerTrial>
ScenarioRun run_attack(std::string name, const ScenarioConfig& cfg, PerTrial&& per_trial) {
    cfg.validate();
    const DictionarySource dicts(cfg);
    ScenarioRun run{start_report(std::move(name), cfg), Transcript{}};
    run.report.notes["dictionary"] = dicts.describe();
    run.report.notes["target_in_dictionary"] = cfg.exclude_target ? "false" : "true";
    Tally tally;
    for (std::uint64_t i = 0; i < cfg.trials; ++i) {
        run.report.metrics["trials_run"] = static_cast<std::int64_t>(i);
        Trial t = make_trial(cfg, i, dicts.victim_identity(i));
        auto a = stolen_card_pipeline(t, dicts, cfg, run.transcript, tally, run.report, i == 0);
        if (a) per_trial(t, *a, run, tally, i == 0);
    }
    run.report.metrics["trials_run"] = static_cast<std::int64_t>(cfg.trials);
    tally.emit(run.report, cfg.trials);
    run.report.finalize();
    return run;
}

}  // namespace

std::string without_timestamps(const std::string& text) {
    json j = json::parse(text);
    strip(j);
    return j.dump();
}

ScenarioRun run_demo_honest(const ScenarioConfig& cfg) {
    cfg.validate();
    ScenarioRun run{start_report("demo honest", cfg), Transcript{}};
    Tally tally;
    std::int64_t accepted = 0;
    std::int64_t sk_equal = 0;
    for (std::uint64_t i = 0; i < cfg.trials; ++i) {
        Stopwatch sw;
        Trial t = make_trial(cfg, i, std::nullopt);
        tally.record("register", true, sw.lap_ms());

        const std::size_t first = run.transcript.size();
        auto session = run_honest_session(t.creds, t.card, t.server, t.user_rng, t.server_rng, run.transcript);
        const auto msgs = index_range(first, run.transcript.size());
        if (!session) {
            tally.record("honest_session", false, sw.lap_ms(), msgs, session.rejection().reason);
            continue;
        }
        const auto& s = session.value();
        const bool both = s.user.accepted && s.server.accepted;
        const bool same_key = both && s.user.sk == s.server.sk;
        accepted += both ? 1 : 0;
        sk_equal += same_key ? 1 : 0;
        if (i == 0 && s.user.sk) run.report.recovered_values["sk"] = s.user.sk->hex();
        tally.record("honest_session", same_key, sw.lap_ms(), msgs, "session keys differ");
    }
    run.report.metrics["accepted"] = accepted;
    run.report.metrics["sk_equal"] = sk_equal;
    tally.emit(run.report, cfg.trials);
    run.report.finalize();
    return run;
}

ScenarioRun run_attack_identity(const ScenarioConfig& cfg) {
    return run_attack("attack identity-guess", cfg, [](Trial&, AttackTrial&, ScenarioRun&, Tally&, bool) {});
}

ScenarioRun run_attack_impersonate(const ScenarioConfig& cfg) {
    std::int64_t v1 = 0;
    std::int64_t v4 = 0;
    auto run = run_attack("attack impersonate", cfg,
                          [&](Trial& t, AttackTrial& a, ScenarioRun& run, Tally& tally, bool first) {
        Stopwatch sw;
        const LoginRequest forged = forge_login(a.knowledge, t.adversary_rng);
        tally.record("forge_login", true, sw.lap_ms());

        const std::size_t from = run.transcript.size();
        auto result = complete_forged_session(a.knowledge, forged, t.server, t.server_rng, run.transcript);
        const auto msgs = index_range(from, run.transcript.size());
        const double ms = sw.lap_ms();
        const bool v1_ok = result.ok() || (result.rejection().at != Checkpoint::v1_nid_decryption &&
                                           result.rejection().at != Checkpoint::v1_authenticator);
        v1 += v1_ok ? 1 : 0;
        if (!tally.record("server_accepts_forged_login_v1", v1_ok, ms, {from},
                          v1_ok ? "" : result.rejection().reason)) {
            return;
        }
        v4 += result.ok() ? 1 : 0;
        if (!tally.record("server_accepts_attacker_confirmation_v4", result.ok(), 0.0, msgs,
                          result.ok() ? "" : result.rejection().reason)) {
            return;
        }
        const auto& f = result.value();
        if (first) {
            run.report.recovered_values["forged_a"] = forged.a.hex();
            run.report.recovered_values["sk"] = f.attacker.sk->hex();
        }
        tally.record("attacker_sk_matches_server", f.attacker.sk == f.server.sk, sw.lap_ms(), msgs,
                     "attacker and server keys differ");
    });
    run.report.metrics["v1_accepts"] = v1;
    run.report.metrics["v4_accepts"] = v4;
    return run;
}

ScenarioRun run_attack_session_key(const ScenarioConfig& cfg) {
    std::int64_t matches = 0;
    auto run = run_attack("attack session-key", cfg,
                          [&](Trial& t, AttackTrial& a, ScenarioRun& run, Tally& tally, bool first) {
        Stopwatch sw;
        if (a.knowledge.observed_requests.empty() || a.knowledge.observed_replies.empty()) {
            tally.record("frame_session_key", false, sw.lap_ms(), {}, "no intercepted request/reply pair");
            return;
        }
        const Digest sk =
            recover_session_key(a.knowledge, a.knowledge.observed_requests.front(), a.knowledge.observed_replies.front());
        const bool same = sk == a.honest->user.sk && sk == a.honest->server.sk;
        matches += same ? 1 : 0;
        const auto msgs = index_range(a.first_message, std::min(a.first_message + 2, a.end_message));
        if (first) run.report.recovered_values["sk"] = sk.hex();
        if (!tally.record("frame_session_key", same, sw.lap_ms(), msgs, "framed key differs from session key")) {
            return;
        }

        bool unmasked = false;
        std::string failure;
        try {
            const Ciphertext nid_star = unmask_next_nid(a.knowledge, a.knowledge.observed_replies.front());
            // Ground truth only: the attacker never holds the server key.
            const FieldEncoding plain = sym_decrypt(t.server.cipher_key(), nid_star);
            unmasked = plain[0] == t.creds.id && nid_star == a.honest->user.next_nid;
            if (first) run.report.recovered_values["next_nid"] = nid_star.hex();
            if (!unmasked) failure = "NID* does not decrypt to the victim identity";
        } catch (const std::exception& e) {
            failure = e.what();
        }
        tally.record("unmask_next_nid", unmasked, sw.lap_ms(), {a.first_message + 1}, failure);
    });
    run.report.metrics["sk_matches"] = matches;
    return run;
}

ScenarioRun run_attack_replay(const ScenarioConfig& cfg) {
    std::int64_t replays = 0;
    auto run = run_attack("attack replay", cfg,
                          [&](Trial& t, AttackTrial& a, ScenarioRun& run, Tally& tally, bool first) {
        Stopwatch sw;
        const LoginRequest& captured = a.knowledge.observed_requests.front();

        // Verbatim replay, no card knowledge needed for V1.
        const std::uint64_t session = run.transcript.open_session();
        const std::size_t idx = run.transcript.record(session, Direction::user_to_server, captured);
        auto challenge = server_validate(t.server, captured, t.server_rng);
        if (challenge) {
            run.transcript.resolve(idx, Status::accepted);
            const std::size_t reply_idx =
                run.transcript.record(session, Direction::server_to_user, challenge.value().reply);
            // Nobody answers the reply; it stays pending.
            (void)reply_idx;
            ++replays;
        } else {
            run.transcript.resolve(idx, Status::rejected, challenge.rejection().at);
        }
        if (!tally.record("replay_accepted_v1", challenge.ok(), sw.lap_ms(), {idx},
                          challenge.ok() ? "" : challenge.rejection().reason)) {
            return;
        }

        const std::size_t from = run.transcript.size();
        auto full = complete_forged_session(a.knowledge, captured, t.server, t.server_rng, run.transcript);
        const bool ok = full.ok() && full.value().attacker.sk == full.value().server.sk;
        if (first && full.ok()) run.report.recovered_values["sk"] = full.value().attacker.sk->hex();
        tally.record("replayed_session_completes_v4", ok, sw.lap_ms(), index_range(from, run.transcript.size()),
                     full.ok() ? "keys differ" : full.rejection().reason);
    });
    run.report.metrics["replays_accepted"] = replays;
    return run;
}

}  // namespace tmis
