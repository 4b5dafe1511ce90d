// tmis: run the honest protocol and the stolen-card attacks as reproducible scenarios.
//
//   tmis demo honest            --seed 7 --trials 1000
//   tmis attack identity-guess  --dict-size 100000 [--target-pos N | --exclude-target]
//   tmis attack impersonate     --trials 1000 --dict-size 1000
//   tmis attack session-key     --transcript out/transcript.json
//   tmis attack replay
//
// The report (JSON) goes to --out or stdout, a one-line summary to stderr.
// Exit codes: 0 scenario completed (whatever the attack outcome), 2 usage error, 1 internal error.

#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tmis/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text << '\n';
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

void print_summary(const tmis::AttackReport& r) {
    std::cerr << r.scenario << ": " << (r.success ? "SUCCESS" : "FAILURE") << '\n';
    for (const auto& s : r.steps) {
        std::cerr << "  " << (s.success ? "[ok]   " : "[fail] ") << s.name << "  (" << s.detail << ", "
                  << s.elapsed_ms << " ms)\n";
    }
    for (const auto& a : r.anomalies) std::cerr << "  anomaly: " << a << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stolen-card cryptanalysis harness for a biometric smart-card TMIS login scheme", "tmis"};
    app.require_subcommand(1);

    tmis::ScenarioConfig cfg;
    std::string dict_path;
    std::size_t target_pos = 0;
    std::string hash_name = "sha256";
    std::size_t secret_bits = tmis::kDefaultServerSecretBytes * 8;
    std::string out_path;
    std::string transcript_path;

    app.add_option("--seed", cfg.seed, "Scenario seed")->capture_default_str();
    auto* dict_opt = app.add_option("--dict", dict_path, "Dictionary file, one identity per line");
    app.add_option("--dict-size", cfg.dictionary_size, "Size of the generated dictionary")->capture_default_str();
    auto* target_opt = app.add_option("--target-pos", target_pos, "Index of the victim identity in the dictionary");
    auto* exclude_opt = app.add_flag("--exclude-target", cfg.exclude_target,
                                     "Negative control: leave the victim identity out of the dictionary");
    target_opt->excludes(exclude_opt);
    app.add_option("--trials", cfg.trials, "Number of seeded trials")->capture_default_str();
    app.add_option("--workers", cfg.workers, "Dictionary search threads (0 = all cores)")->capture_default_str();
    app.add_option("--hash", hash_name, "Hash for h() and H()")
        ->check(CLI::IsMember({"sha256", "sha3-256", "blake2s-256"}))
        ->capture_default_str();
    app.add_option("--secret-bits", secret_bits, "Length of the server secret x in bits (multiple of 8)")
        ->capture_default_str();
    app.add_option("--out", out_path, "Write the JSON report here instead of stdout");
    app.add_option("--transcript", transcript_path, "Write the channel transcript JSON here");

    using Runner = std::function<tmis::ScenarioRun(const tmis::ScenarioConfig&)>;
    Runner runner;

    auto* demo = app.add_subcommand("demo", "Honest protocol runs")->require_subcommand(1)->fallthrough();
    demo->add_subcommand("honest", "Register, log in and agree on a session key")
        ->fallthrough()
        ->callback([&] { runner = tmis::run_demo_honest; });

    auto* attack = app.add_subcommand("attack", "Stolen-card attacks")->require_subcommand(1)->fallthrough();
    attack->add_subcommand("identity-guess", "Offline identity guessing from card secrets and one login")
        ->fallthrough()
        ->callback([&] { runner = tmis::run_attack_identity; });
    attack->add_subcommand("impersonate", "Forge a fresh login and complete the session as the victim")
        ->fallthrough()
        ->callback([&] { runner = tmis::run_attack_impersonate; });
    attack->add_subcommand("session-key", "Frame the session key of an eavesdropped session")
        ->fallthrough()
        ->callback([&] { runner = tmis::run_attack_session_key; });
    attack->add_subcommand("replay", "Replay a captured login request verbatim")
        ->fallthrough()
        ->callback([&] { runner = tmis::run_attack_replay; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (!dict_opt->empty()) cfg.dictionary_path = dict_path;
        if (!target_opt->empty()) cfg.target_position = target_pos;
        cfg.hash = tmis::parse_hash_algorithm(hash_name);
        if (secret_bits == 0 || secret_bits % 8 != 0) {
            throw tmis::UsageError("--secret-bits must be a positive multiple of 8");
        }
        cfg.server_secret_bytes = secret_bits / 8;

        const tmis::ScenarioRun run = runner(cfg);
        const std::string report = run.report.to_json();
        if (out_path.empty()) {
            std::cout << report << '\n';
        } else {
            write_file(out_path, report);
        }
        if (!transcript_path.empty()) write_file(transcript_path, run.transcript.to_json());
        print_summary(run.report);
        return kExitOk;
    } catch (const tmis::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInternal;
    }
}
