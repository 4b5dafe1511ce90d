#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmis/primitives.hpp"
#include "tmis/transcript.hpp"

namespace tmis {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ScenarioConfig {
    std::uint64_t seed = 7;
    std::optional<std::filesystem::path> dictionary_path;
    std::size_t dictionary_size = 10'000;
    /// Index of the victim's identity in the dictionary; defaults to the last index.
    std::optional<std::size_t> target_position;
    /// Negative control: keep the victim's identity out of the dictionary.
    bool exclude_target = false;
    std::size_t trials = 1;
    unsigned workers = 0;
    HashAlgorithm hash = HashAlgorithm::sha256;
    std::size_t server_secret_bytes = kDefaultServerSecretBytes;

    /// Throws UsageError on trials == 0, dictionary_size == 0, an empty
    /// server secret, or target_position >= dictionary_size (generated dictionaries).
    void validate() const;
};

struct ReportStep {
    std::string name;
    bool success = false;
    double elapsed_ms = 0.0;
    std::string detail;
    /// Transcript indices of the messages this step used or produced.
    std::vector<std::size_t> messages;
};

struct AttackReport {
    std::string scenario;
    bool success = false;
    std::vector<ReportStep> steps;
    std::map<std::string, std::string> recovered_values;  // lowercase hex
    std::map<std::string, std::int64_t> metrics;
    std::map<std::string, std::string> notes;
    std::vector<std::string> anomalies;

    /// success = every step succeeded (and there is at least one step).
    void finalize();
    [[nodiscard]] std::string to_json() const;
};

struct ScenarioRun {
    AttackReport report;
    Transcript transcript;
};

ScenarioRun run_demo_honest(const ScenarioConfig& config);
ScenarioRun run_attack_identity(const ScenarioConfig& config);
ScenarioRun run_attack_impersonate(const ScenarioConfig& config);
ScenarioRun run_attack_session_key(const ScenarioConfig& config);
ScenarioRun run_attack_replay(const ScenarioConfig& config);

/// Re-serialises `json` without any "received_at" or "elapsed_ms" members,
/// for comparing runs that differ only in wall-clock fields.
std::string without_timestamps(const std::string& json);

}  // namespace tmis
