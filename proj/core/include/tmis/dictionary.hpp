#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tmis/bytes.hpp"
#include "tmis/rng.hpp"

namespace tmis {

/// Candidate identities for offline guessing, in search order.
class Dictionary {
public:
    /// Throws std::invalid_argument if `candidates` is empty.
    explicit Dictionary(std::vector<Bytes> candidates, std::optional<bool> contains_target = std::nullopt);

    /// One candidate per line, UTF-8. Trailing whitespace (including CR) is
    /// stripped and blank lines are skipped. Throws std::runtime_error if the
    /// file cannot be read or holds no candidates.
    static Dictionary load(const std::filesystem::path& path);
    static Dictionary parse(std::string_view text);

    void save(const std::filesystem::path& path) const;

    [[nodiscard]] const std::vector<Bytes>& candidates() const { return candidates_; }
    [[nodiscard]] std::size_t size() const { return candidates_.size(); }
    [[nodiscard]] const Bytes& operator[](std::size_t i) const { return candidates_.at(i); }

    /// Harness bookkeeping only; the search never reads it.
    [[nodiscard]] std::optional<bool> contains_target() const { return contains_target_; }
    void set_contains_target(bool v) { contains_target_ = v; }

private:
    std::vector<Bytes> candidates_;
    std::optional<bool> contains_target_;
};

/// A plausible patient identity: an SSN, an e-mail address or a phone number.
std::string generate_identity(Rng& rng);

/// `size` generated identities, none equal to `target`. If `target_position`
/// is set, the target is placed at that index.
/// Throws std::invalid_argument if size is 0 or target_position >= size.
Dictionary generate_dictionary(std::size_t size, Rng& rng, const std::string& target,
                               std::optional<std::size_t> target_position);

}  // namespace tmis
