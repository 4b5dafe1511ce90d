#include "tmis/dictionary.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tmis {

Dictionary::Dictionary(std::vector<Bytes> candidates, std::optional<bool> contains_target)
    : candidates_(std::move(candidates)), contains_target_(contains_target) {
    if (candidates_.empty()) throw std::invalid_argument("dictionary has no candidates");
}

Dictionary Dictionary::parse(std::string_view text) {
    std::vector<Bytes> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
            line.remove_suffix(1);
        }
        if (!line.empty()) out.push_back(to_bytes(line));
        pos = end + 1;
    }
    if (out.empty()) throw std::runtime_error("dictionary has no candidates");
    return Dictionary(std::move(out));
}

Dictionary Dictionary::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dictionary: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void Dictionary::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write dictionary: " + path.string());
    for (const auto& c : candidates_) {
        out.write(reinterpret_cast<const char*>(c.data()), static_cast<std::streamsize>(c.size()));
        out.put('\n');
    }
}

namespace {

constexpr std::array<std::string_view, 12> kFirstNames = {
    "alice", "bob", "carol", "dave", "erin", "frank", "grace", "heidi", "ivan", "judy", "mallory", "oscar"};
constexpr std::array<std::string_view, 10> kLastNames = {
    "smith", "jones", "patel", "garcia", "kim", "nguyen", "rao", "silva", "muller", "chen"};
constexpr std::array<std::string_view, 5> kDomains = {
    "example.org", "mail.example.com", "clinic.example", "hospital.example.net", "patients.example"};

std::string digits(Rng& rng, int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + rng.uniform(10)));
    return s;
}

template <std::size_t N>
std::string_view pick(Rng& rng, const std::array<std::string_view, N>& items) {
    return items[rng.uniform(N)];
}

}  // namespace

std::string generate_identity(Rng& rng) {
    switch (rng.uniform(3)) {
        case 0:
            return digits(rng, 3) + "-" + digits(rng, 2) + "-" + digits(rng, 4);
        case 1: {
            std::string s(pick(rng, kFirstNames));
            s += ".";
            s += pick(rng, kLastNames);
            s += digits(rng, 4);
            s += "@";
            s += pick(rng, kDomains);
            return s;
        }
        default:
            return "+1-" + digits(rng, 3) + "-" + digits(rng, 3) + "-" + digits(rng, 4);
    }
}

Dictionary generate_dictionary(std::size_t size, Rng& rng, const std::string& target,
                               std::optional<std::size_t> target_position) {
    if (size == 0) throw std::invalid_argument("dictionary size must be positive");
    if (target_position && *target_position >= size) {
        throw std::invalid_argument("target position outside the dictionary");
    }
    std::vector<Bytes> out;
    out.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        if (target_position && i == *target_position) {
            out.push_back(to_bytes(target));
            continue;
        }
        std::string candidate = generate_identity(rng);
        while (candidate == target) candidate = generate_identity(rng);
        out.push_back(to_bytes(candidate));
    }
    return Dictionary(std::move(out), target_position.has_value());
}

}  // namespace tmis
