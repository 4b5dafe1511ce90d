#include "tmis/transcript.hpp"

#include <chrono>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tmis {

using nlohmann::json;

namespace {

std::int64_t system_clock_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

json fields_of(const Message& m) {
    return std::visit(
        [](const auto& msg) -> json {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, LoginRequest>) {
                return {{"nid", msg.nid.hex()}, {"a", msg.a.hex()}, {"r_u", msg.r_u.hex()}};
            } else if constexpr (std::is_same_v<T, LoginReply>) {
                return {{"r_s", msg.r_s.hex()},
                        {"auth_tag", msg.auth_tag.hex()},
                        {"masked_nid", to_hex(msg.masked_nid)}};
            } else {
                return {{"c", msg.c.hex()}};
            }
        },
        m);
}

template <typename Fixed>
Fixed fixed_field(const json& fields, const char* name) {
    return Fixed(from_hex(fields.at(name).get<std::string>()));
}

Message message_from(std::string_view type, const json& f) {
    if (type == "LoginRequest") {
        return LoginRequest{Ciphertext(from_hex(f.at("nid").get<std::string>())),
                            fixed_field<Digest>(f, "a"), fixed_field<Nonce>(f, "r_u")};
    }
    if (type == "LoginReply") {
        return LoginReply{fixed_field<Nonce>(f, "r_s"), fixed_field<Digest>(f, "auth_tag"),
                          from_hex(f.at("masked_nid").get<std::string>())};
    }
    if (type == "SessionConfirm") return SessionConfirm{fixed_field<Digest>(f, "c")};
    throw std::invalid_argument("unknown message type: " + std::string(type));
}

Direction parse_direction(std::string_view s) {
    if (s == direction_name(Direction::user_to_server)) return Direction::user_to_server;
    if (s == direction_name(Direction::server_to_user)) return Direction::server_to_user;
    throw std::invalid_argument("unknown direction: " + std::string(s));
}

Status parse_status(std::string_view s) {
    for (Status st : {Status::pending, Status::accepted, Status::rejected}) {
        if (s == status_name(st)) return st;
    }
    throw std::invalid_argument("unknown outcome: " + std::string(s));
}

Checkpoint parse_checkpoint(std::string_view s) {
    for (Checkpoint c : {Checkpoint::card_local_check, Checkpoint::v1_nid_decryption,
                         Checkpoint::v1_authenticator, Checkpoint::v3_server_tag,
                         Checkpoint::v4_confirmation}) {
        if (s == checkpoint_name(c)) return c;
    }
    throw std::invalid_argument("unknown checkpoint: " + std::string(s));
}

}  // namespace

std::string_view message_type(const Message& m) {
    static constexpr std::string_view kNames[] = {"LoginRequest", "LoginReply", "SessionConfirm"};
    return kNames[m.index()];
}

std::string_view direction_name(Direction d) {
    return d == Direction::user_to_server ? "user->server" : "server->user";
}

std::string_view status_name(Status s) {
    switch (s) {
        case Status::pending: return "pending";
        case Status::accepted: return "accepted";
        case Status::rejected: return "rejected";
    }
    return "unknown";
}

Transcript::Transcript() : clock_(system_clock_ms) {}

Transcript::Transcript(Clock clock) : clock_(std::move(clock)) {}

std::size_t Transcript::record(std::uint64_t session, Direction direction, Message message) {
    entries_.push_back(
        TranscriptEntry{session, direction, std::move(message), Status::pending, std::nullopt, clock_()});
    return entries_.size() - 1;
}

void Transcript::resolve(std::size_t index, Status outcome, std::optional<Checkpoint> at) {
    TranscriptEntry& e = entries_.at(index);
    if (e.outcome != Status::pending) throw std::logic_error("transcript entry already resolved");
    if (outcome == Status::pending) throw std::logic_error("cannot resolve to pending");
    e.outcome = outcome;
    if (outcome == Status::rejected) e.rejected_at = at;
}

std::vector<LoginRequest> Transcript::login_requests() const {
    std::vector<LoginRequest> out;
    for (const auto& e : entries_) {
        if (const auto* r = std::get_if<LoginRequest>(&e.message)) out.push_back(*r);
    }
    return out;
}

std::vector<LoginReply> Transcript::login_replies() const {
    std::vector<LoginReply> out;
    for (const auto& e : entries_) {
        if (const auto* r = std::get_if<LoginReply>(&e.message)) out.push_back(*r);
    }
    return out;
}

std::string Transcript::to_json() const {
    json arr = json::array();
    for (const auto& e : entries_) {
        json j = {{"session", e.session},
                  {"direction", direction_name(e.direction)},
                  {"type", message_type(e.message)},
                  {"fields", fields_of(e.message)},
                  {"outcome", status_name(e.outcome)},
                  {"received_at", e.received_at_ms}};
        if (e.rejected_at) j["rejected_at"] = checkpoint_name(*e.rejected_at);
        arr.push_back(std::move(j));
    }
    return arr.dump();
}

Transcript Transcript::from_json(std::string_view text) {
    Transcript t;
    try {
        const json arr = json::parse(text);
        if (!arr.is_array()) throw std::invalid_argument("transcript JSON must be an array");
        for (const auto& j : arr) {
            TranscriptEntry e;
            e.session = j.at("session").get<std::uint64_t>();
            e.direction = parse_direction(j.at("direction").get<std::string>());
            e.message = message_from(j.at("type").get<std::string>(), j.at("fields"));
            e.outcome = parse_status(j.at("outcome").get<std::string>());
            e.received_at_ms = j.value("received_at", std::int64_t{0});
            if (j.contains("rejected_at")) {
                e.rejected_at = parse_checkpoint(j.at("rejected_at").get<std::string>());
            }
            if (e.session >= t.next_session_) t.next_session_ = e.session + 1;
            t.entries_.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed transcript JSON: ") + e.what());
    } catch (const EncodingError& e) {
        throw std::invalid_argument(std::string("malformed transcript field: ") + e.what());
    }
    return t;
}

}  // namespace tmis
