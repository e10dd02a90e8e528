#include "mtirl/live/protocol.hpp"

namespace mtirl::live {

using nlohmann::json;

std::string_view to_string(Lifecycle s) noexcept {
    switch (s) {
        case Lifecycle::lobby: return "lobby";
        case Lifecycle::running: return "running";
        case Lifecycle::paused: return "paused";
        case Lifecycle::finished: return "finished";
    }
    return "lobby";
}

std::string_view to_string(RejectReason r) noexcept {
    switch (r) {
        case RejectReason::duplicate: return "duplicate";
        case RejectReason::late: return "late";
        case RejectReason::unknown_query: return "unknown_query";
        case RejectReason::unknown_trainer: return "unknown_trainer";
        case RejectReason::unknown_session: return "unknown_session";
        case RejectReason::malformed: return "malformed";
    }
    return "malformed";
}

TrustSnapshot snapshot_of(const TrustRecord& rec) {
    return {trustworthiness(rec), rec.alpha(), rec.beta(), belief_mass(rec).uncertainty};
}

namespace {

json subject_json(const StateAction& sa) {
    return {{"state", {sa.state.x, sa.state.y}}, {"action", to_string(sa.action)}};
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) {
        throw ProtocolError(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

std::string require_string(const json& j, const char* key) {
    const auto& v = require(j, key);
    if (!v.is_string() || v.get_ref<const std::string&>().empty()) {
        throw ProtocolError(std::string("field '") + key + "' must be a non-empty string");
    }
    return v.get<std::string>();
}

QueryId require_query_id(const json& j) {
    const auto& v = require(j, "query_id");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw ProtocolError("field 'query_id' must be a non-negative integer");
    }
    return v.get<QueryId>();
}

}  // namespace

json to_json(const Message& m) {
    return std::visit(
        overloaded{
            [](const JoinMessage& x) -> json {
                return {{"type", "join"}, {"session_id", x.session_id}, {"trainer_id", x.trainer_id}};
            },
            [](const JoinedMessage& x) -> json {
                return {{"type", "joined"},
                        {"session_id", x.session_id},
                        {"trainer_id", x.trainer_id},
                        {"trust", x.trust},
                        {"state", to_string(x.state)}};
            },
            [](const QueryMessage& x) -> json {
                json j = subject_json(x.subject);
                j["type"] = "query";
                j["session_id"] = x.session_id;
                j["query_id"] = x.query_id;
                j["grid"] = json::parse(x.grid_json);
                j["deadline_ms"] = x.deadline_ms;
                return j;
            },
            [](const FeedbackMessage& x) -> json {
                return {{"type", "feedback"},
                        {"session_id", x.session_id},
                        {"query_id", x.query_id},
                        {"trainer_id", x.trainer_id},
                        {"value", to_string(x.value)}};
            },
            [](const FeedbackRejectedMessage& x) -> json {
                return {{"type", "feedback_rejected"},
                        {"query_id", x.query_id},
                        {"trainer_id", x.trainer_id},
                        {"reason", to_string(x.reason)}};
            },
            [](const DecisionMessage& x) -> json {
                json j = subject_json(x.subject);
                j["type"] = "decision";
                j["session_id"] = x.session_id;
                j["query_id"] = x.query_id ? json(*x.query_id) : json(nullptr);
                j["reward"] = to_string(x.decision.reward);
                j["p_pos"] = x.decision.p_pos;
                j["p_neg"] = x.decision.p_neg;
                j["confidence"] = x.decision.confidence;
                j["avg_uncertainty"] = x.decision.avg_uncertainty;
                j["queried"] = x.queried;
                j["episode"] = x.episode;
                j["step"] = x.step;
                json trust = json::object();
                for (const auto& [id, s] : x.trust) {
                    trust[id] = {{"trust", s.trust}, {"alpha", s.alpha}, {"beta", s.beta}, {"uncertainty", s.uncertainty}};
                }
                j["trust"] = std::move(trust);
                return j;
            },
            [](const SessionStateMessage& x) -> json {
                json j = {{"type", "session_state"},
                          {"session_id", x.session_id},
                          {"state", to_string(x.state)},
                          {"episode", x.episode},
                          {"steps", x.steps},
                          {"queries", x.queries},
                          {"roster", x.roster},
                          {"best_solution", x.best_solution}};
                j["closeness"] = x.closeness ? json(*x.closeness) : json(nullptr);
                return j;
            },
        },
        m);
}

std::string encode(const Message& m) { return to_json(m).dump(); }

Message decode(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error&) {
        throw ProtocolError("message is not valid JSON");
    }
    if (!j.is_object()) {
        throw ProtocolError("message must be a JSON object");
    }
    const std::string type = require_string(j, "type");
    if (type == "join") {
        return JoinMessage{require_string(j, "session_id"), require_string(j, "trainer_id")};
    }
    if (type == "feedback") {
        const auto vote = parse_vote(require_string(j, "value"));
        if (!vote) {
            throw ProtocolError("field 'value' must be 'positive' or 'negative'");
        }
        return FeedbackMessage{require_string(j, "session_id"), require_query_id(j), require_string(j, "trainer_id"),
                               *vote};
    }
    if (type == "feedback_rejected") {
        FeedbackRejectedMessage m{require_query_id(j), require_string(j, "trainer_id"), RejectReason::malformed};
        const std::string reason = require_string(j, "reason");
        for (auto r : {RejectReason::duplicate, RejectReason::late, RejectReason::unknown_query,
                       RejectReason::unknown_trainer, RejectReason::unknown_session, RejectReason::malformed}) {
            if (reason == to_string(r)) m.reason = r;
        }
        return m;
    }
    if (type == "joined" || type == "query" || type == "decision" || type == "session_state") {
        // Server-to-client messages are decoded by clients; the server only
        // needs their encoders. Accept the envelope for completeness.
        const auto& st = j.contains("state") ? j["state"] : json();
        if (type == "query") {
            const auto action = parse_action(require_string(j, "action"));
            if (!action || !st.is_array() || st.size() != 2) throw ProtocolError("malformed query subject");
            return QueryMessage{require_string(j, "session_id"), require_query_id(j),
                                {{st[0].get<int>(), st[1].get<int>()}, *action},
                                require(j, "grid").dump(),
                                require(j, "deadline_ms").get<std::int64_t>()};
        }
        if (type == "joined") {
            JoinedMessage m{require_string(j, "session_id"), require_string(j, "trainer_id"),
                            require(j, "trust").get<double>(), Lifecycle::lobby};
            for (auto s : {Lifecycle::lobby, Lifecycle::running, Lifecycle::paused, Lifecycle::finished}) {
                if (require_string(j, "state") == to_string(s)) m.state = s;
            }
            return m;
        }
        if (type == "decision") {
            DecisionMessage m;
            m.session_id = require_string(j, "session_id");
            if (!require(j, "query_id").is_null()) m.query_id = require_query_id(j);
            const auto action = parse_action(require_string(j, "action"));
            if (!action || !st.is_array() || st.size() != 2) throw ProtocolError("malformed decision subject");
            m.subject = {{st[0].get<int>(), st[1].get<int>()}, *action};
            const std::string reward = require_string(j, "reward");
            m.decision.reward = reward == "positive" ? Reward::positive
                                : reward == "negative" ? Reward::negative
                                                       : Reward::tie;
            m.decision.p_pos = require(j, "p_pos").get<double>();
            m.decision.p_neg = require(j, "p_neg").get<double>();
            m.decision.confidence = require(j, "confidence").get<double>();
            m.decision.avg_uncertainty = require(j, "avg_uncertainty").get<double>();
            m.queried = require(j, "queried").get<bool>();
            m.episode = require(j, "episode").get<std::size_t>();
            m.step = require(j, "step").get<std::size_t>();
            for (const auto& [id, s] : require(j, "trust").items()) {
                m.trust[id] = {s.at("trust").get<double>(), s.at("alpha").get<double>(), s.at("beta").get<double>(),
                               s.at("uncertainty").get<double>()};
            }
            return m;
        }
        SessionStateMessage m;
        m.session_id = require_string(j, "session_id");
        for (auto s : {Lifecycle::lobby, Lifecycle::running, Lifecycle::paused, Lifecycle::finished}) {
            if (require_string(j, "state") == to_string(s)) m.state = s;
        }
        m.episode = require(j, "episode").get<std::size_t>();
        m.steps = require(j, "steps").get<std::size_t>();
        m.queries = require(j, "queries").get<std::size_t>();
        m.roster = require(j, "roster").get<std::size_t>();
        m.best_solution = require(j, "best_solution").get<bool>();
        if (!require(j, "closeness").is_null()) m.closeness = j["closeness"].get<double>();
        return m;
    }
    throw ProtocolError("unknown message type '" + type + "'");
}

}  // namespace mtirl::live
