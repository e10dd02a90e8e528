#pragma once

// Wire protocol: one JSON object per WebSocket text frame, discriminated by
// "type". Schemas are documented in docs/protocol.md.

#include "mtirl/aggregate.hpp"
#include "mtirl/gridworld.hpp"
#include "mtirl/trust.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>

namespace mtirl::live {

using QueryId = std::uint64_t;

enum class Lifecycle : std::uint8_t { lobby, running, paused, finished };
std::string_view to_string(Lifecycle s) noexcept;

/// Why a feedback submission was refused.
enum class RejectReason : std::uint8_t {
    duplicate,        // trainer already answered this query
    late,             // query closed (deadline passed or decided)
    unknown_query,    // query id never issued by this session
    unknown_trainer,  // trainer has not joined the session
    unknown_session,  // session id does not match the joined session
    malformed,        // message failed validation
};
std::string_view to_string(RejectReason r) noexcept;

struct JoinMessage {
    std::string session_id;
    TrainerId trainer_id;
};

struct JoinedMessage {
    std::string session_id;
    TrainerId trainer_id;
    double trust = 0.5;
    Lifecycle state = Lifecycle::lobby;
};

struct QueryMessage {
    std::string session_id;
    QueryId query_id = 0;
    StateAction subject;
    std::string grid_json;  // GridMap::to_json()
    std::int64_t deadline_ms = 0;
};

struct FeedbackMessage {
    std::string session_id;
    QueryId query_id = 0;
    TrainerId trainer_id;
    Vote value = Vote::positive;
};

struct FeedbackRejectedMessage {
    QueryId query_id = 0;
    TrainerId trainer_id;
    RejectReason reason = RejectReason::malformed;
};

struct TrustSnapshot {
    double trust = 0.5;
    double alpha = 0.0;
    double beta = 0.0;
    double uncertainty = 1.0;

    friend bool operator==(const TrustSnapshot&, const TrustSnapshot&) = default;
};

struct DecisionMessage {
    std::string session_id;
    std::optional<QueryId> query_id;  // empty when served from the archive
    StateAction subject;
    Decision decision;
    bool queried = false;
    std::size_t episode = 0;
    std::size_t step = 0;
    std::map<TrainerId, TrustSnapshot> trust;
};

struct SessionStateMessage {
    std::string session_id;
    Lifecycle state = Lifecycle::lobby;
    std::size_t episode = 0;
    std::size_t steps = 0;
    std::size_t queries = 0;
    std::size_t roster = 0;
    std::optional<double> closeness;  // reported once finished
    bool best_solution = false;
};

using Message = std::variant<JoinMessage, JoinedMessage, QueryMessage, FeedbackMessage, FeedbackRejectedMessage,
                             DecisionMessage, SessionStateMessage>;

nlohmann::json to_json(const Message& m);
std::string encode(const Message& m);

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses and validates one message; throws ProtocolError.
Message decode(std::string_view text);

TrustSnapshot snapshot_of(const TrustRecord& rec);

}  // namespace mtirl::live
