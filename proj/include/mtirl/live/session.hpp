#pragma once

#include "mtirl/gridworld.hpp"
#include "mtirl/live/protocol.hpp"
#include "mtirl/memory.hpp"
#include "mtirl/qtable.hpp"
#include "mtirl/random.hpp"
#include "mtirl/sarsa.hpp"
#include "mtirl/trust.hpp"

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>

namespace mtirl::live {

struct SessionOptions {
    GridMap map = GridMap::default_map();
    LearnerConfig learner;
    std::chrono::milliseconds deadline{10000};
    int max_episodes = 500;
    int check_every = 5;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument naming the field.
    void validate() const;
};

/// Reads the create-session request body; absent fields keep defaults.
/// Throws std::invalid_argument on unknown or ill-typed fields.
SessionOptions session_options_from_json(const nlohmann::json& body);

/// Receives every message a session broadcasts. Sinks run with the session
/// lock held and must not call back into the session.
using Sink = std::function<void(const Message&)>;

struct SubmitResult {
    bool accepted = false;
    RejectReason reason = RejectReason::malformed;
};

/// One live training session. All mutation goes through the session mutex;
/// the agent loop releases it only while waiting for feedback.
class Session {
public:
    Session(std::string id, SessionOptions options);

    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] const SessionOptions& options() const noexcept { return options_; }
    [[nodiscard]] Lifecycle state() const;

    /// Adds the trainer to the roster. New names get a fresh record; a known
    /// name keeps its history.
    JoinedMessage join(const TrainerId& trainer);
    void leave(const TrainerId& trainer);
    [[nodiscard]] std::set<TrainerId> roster() const;

    SubmitResult submit_feedback(QueryId query, const TrainerId& trainer, Vote value);

    std::size_t subscribe(Sink sink);
    void unsubscribe(std::size_t token);

    /// join() plus subscribe() under one lock: the sink first receives the
    /// joined message and the open query, if any. Returns the sink token.
    std::size_t attach(const TrainerId& trainer, Sink sink);
    /// Undoes attach().
    void detach(std::size_t token, const TrainerId& trainer);

    /// lobby|paused → running.
    void start();
    /// running → paused. A step already in flight completes first.
    void pause();

    /// Broadcasts a query for `subject` and collects feedback until the
    /// deadline or until every roster member answered. Events are ordered by
    /// trainer id.
    FeedbackSet gather_feedback(const StateAction& subject);

    /// One agent action: choose, resolve, update, broadcast.
    DecisionMessage step();

    [[nodiscard]] SessionStateMessage summary() const;
    [[nodiscard]] TrustStore trust() const;
    [[nodiscard]] QTable qtable() const;
    [[nodiscard]] std::size_t archive_size() const;
    [[nodiscard]] std::optional<QueryMessage> open_query() const;

    /// Writes trust.csv, archive.json, qtable.csv and session.json into `dir`.
    void save(const std::filesystem::path& dir) const;
    /// Rebuilds a paused session from a directory written by save().
    static std::unique_ptr<Session> restore(std::string id, SessionOptions options, const std::filesystem::path& dir);

private:
    using Lock = std::unique_lock<std::mutex>;

    JoinedMessage join_locked(const TrainerId& trainer);
    FeedbackSet gather_locked(Lock& lock, const StateAction& subject);
    void broadcast_locked(const Message& m);
    SessionStateMessage summary_locked() const;
    void end_episode_locked(Outcome outcome);

    std::string id_;
    SessionOptions options_;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    Lifecycle state_ = Lifecycle::lobby;
    std::set<TrainerId> roster_;
    TrustStore store_;
    FeedbackArchive archive_;
    QTable q_;
    Rng rng_;

    // Open query, if any.
    QueryId next_query_ = 1;
    std::optional<QueryMessage> open_query_;
    std::map<TrainerId, Vote> answers_;
    // Who answered the most recently closed queries, so a re-send is
    // reported as a duplicate rather than late.
    std::map<QueryId, std::set<TrainerId>> closed_answers_;

    // Agent position within the current episode.
    bool in_episode_ = false;
    AgentState s_{};
    Action a_ = Action::up;
    int t_ = 0;
    std::size_t episode_ = 0;
    std::size_t steps_ = 0;
    std::size_t queries_ = 0;
    bool best_solution_ = false;

    std::map<std::size_t, Sink> sinks_;
    std::size_t next_sink_ = 0;
};

/// Owns every session of one server process.
class SessionRegistry {
public:
    /// Validates and opens a lobby session; returns its id.
    std::string open(SessionOptions options);
    std::shared_ptr<Session> find(const std::string& id) const;
    std::vector<std::shared_ptr<Session>> list() const;
    void adopt(std::shared_ptr<Session> session);

private:
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::size_t next_id_ = 1;
};

}  // namespace mtirl::live
