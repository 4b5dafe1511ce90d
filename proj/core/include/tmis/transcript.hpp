#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tmis/protocol.hpp"

namespace tmis {

enum class Direction { user_to_server, server_to_user };
enum class Status { pending, accepted, rejected };

using Message = std::variant<LoginRequest, LoginReply, SessionConfirm>;

std::string_view message_type(const Message& m);

struct TranscriptEntry {
    std::uint64_t session = 0;
    Direction direction = Direction::user_to_server;
    Message message;
    Status outcome = Status::pending;
    std::optional<Checkpoint> rejected_at;
    /// Receipt time in milliseconds since the epoch. Never checked by the server.
    std::int64_t received_at_ms = 0;
};

/// Ordered record of everything sent over the public channel.
/// Not synchronised: callers serialise appends.
class Transcript {
public:
    using Clock = std::function<std::int64_t()>;

    Transcript();
    explicit Transcript(Clock clock);

    /// Opens a new session id for grouping the messages of one run.
    std::uint64_t open_session() { return next_session_++; }

    /// Appends a pending entry and returns its index.
    std::size_t record(std::uint64_t session, Direction direction, Message message);

    /// pending -> accepted | rejected. Throws std::logic_error on any other transition.
    void resolve(std::size_t index, Status outcome, std::optional<Checkpoint> at = std::nullopt);

    [[nodiscard]] const std::vector<TranscriptEntry>& entries() const { return entries_; }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] bool empty() const { return entries_.empty(); }

    [[nodiscard]] std::vector<LoginRequest> login_requests() const;
    [[nodiscard]] std::vector<LoginReply> login_replies() const;

    /// Compact JSON array; byte strings are lowercase hex.
    [[nodiscard]] std::string to_json() const;
    /// Throws std::invalid_argument on malformed input.
    static Transcript from_json(std::string_view json);

private:
    Clock clock_;
    std::uint64_t next_session_ = 0;
    std::vector<TranscriptEntry> entries_;
};

std::string_view direction_name(Direction d);
std::string_view status_name(Status s);

}  // namespace tmis
