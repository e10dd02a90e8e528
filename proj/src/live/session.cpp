#include "mtirl/live/session.hpp"

#include "mtirl/experiments.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mtirl::live {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr std::size_t kClosedQueriesKept = 16;
}  // namespace

void SessionOptions::validate() const {
    learner.validate();
    if (deadline.count() <= 0) throw std::invalid_argument("deadline_ms: must be positive");
    if (max_episodes <= 0) throw std::invalid_argument("max_episodes: must be positive");
    if (check_every <= 0) throw std::invalid_argument("check_every: must be positive");
}

SessionOptions session_options_from_json(const json& body) {
    SessionOptions o;
    if (body.is_null()) return o;
    if (!body.is_object()) throw std::invalid_argument("request body must be a JSON object");
    auto number = [](const json& v, const std::string& field) {
        if (!v.is_number()) throw std::invalid_argument(field + ": must be a number");
        return v.get<double>();
    };
    auto integer = [](const json& v, const std::string& field) {
        if (!v.is_number_integer()) throw std::invalid_argument(field + ": must be an integer");
        return v.get<std::int64_t>();
    };
    for (const auto& [key, v] : body.items()) {
        if (key == "map") {
            o.map = GridMap::from_json(v.dump());
        } else if (key == "deadline_ms") {
            o.deadline = std::chrono::milliseconds(integer(v, key));
        } else if (key == "seed") {
            if (!v.is_number_unsigned()) throw std::invalid_argument("seed: must be a non-negative integer");
            o.seed = v.get<std::uint64_t>();
        } else if (key == "max_episodes") {
            o.max_episodes = static_cast<int>(integer(v, key));
        } else if (key == "check_every") {
            o.check_every = static_cast<int>(integer(v, key));
        } else if (key == "learner") {
            if (!v.is_object()) throw std::invalid_argument("learner: must be an object");
            LearnerConfig& l = o.learner;
            for (const auto& [lk, lv] : v.items()) {
                const std::string field = "learner." + lk;
                if (lk == "learning_rate") l.learning_rate = number(lv, field);
                else if (lk == "gamma") l.gamma = number(lv, field);
                else if (lk == "epsilon_start") l.epsilon_start = number(lv, field);
                else if (lk == "epsilon_end") l.epsilon_end = number(lv, field);
                else if (lk == "epsilon_decay_episodes") l.epsilon_decay_episodes = static_cast<int>(integer(lv, field));
                else if (lk == "max_actions") l.max_actions = static_cast<int>(integer(lv, field));
                else if (lk == "r_pos") l.r_pos = number(lv, field);
                else if (lk == "r_neg") l.r_neg = number(lv, field);
                else if (lk == "r_tie") l.r_tie = number(lv, field);
                else throw std::invalid_argument(field + ": unknown field");
            }
        } else {
            throw std::invalid_argument(key + ": unknown field");
        }
    }
    o.validate();
    return o;
}

Session::Session(std::string id, SessionOptions options)
    : id_(std::move(id)), options_(std::move(options)), q_(options_.map), rng_(options_.seed) {
    options_.validate();
}

Lifecycle Session::state() const {
    std::lock_guard lock(mu_);
    return state_;
}

JoinedMessage Session::join_locked(const TrainerId& trainer) {
    if (trainer.empty()) throw std::invalid_argument("trainer id must be non-empty");
    store_.ensure(trainer);
    roster_.insert(trainer);
    cv_.notify_all();
    return {id_, trainer, store_.trust(trainer), state_};
}

JoinedMessage Session::join(const TrainerId& trainer) {
    std::lock_guard lock(mu_);
    return join_locked(trainer);
}

std::size_t Session::attach(const TrainerId& trainer, Sink sink) {
    std::lock_guard lock(mu_);
    sink(join_locked(trainer));
    if (open_query_) sink(*open_query_);
    sinks_.emplace(next_sink_, std::move(sink));
    return next_sink_++;
}

void Session::detach(std::size_t token, const TrainerId& trainer) {
    std::lock_guard lock(mu_);
    sinks_.erase(token);
    roster_.erase(trainer);
    cv_.notify_all();
}

std::optional<QueryMessage> Session::open_query() const {
    std::lock_guard lock(mu_);
    return open_query_;
}

void Session::leave(const TrainerId& trainer) {
    std::lock_guard lock(mu_);
    roster_.erase(trainer);
    cv_.notify_all();
}

std::set<TrainerId> Session::roster() const {
    std::lock_guard lock(mu_);
    return roster_;
}

SubmitResult Session::submit_feedback(QueryId query, const TrainerId& trainer, Vote value) {
    std::lock_guard lock(mu_);
    if (!roster_.contains(trainer)) return {false, RejectReason::unknown_trainer};
    if (query == 0 || query >= next_query_) return {false, RejectReason::unknown_query};
    if (!open_query_ || open_query_->query_id != query) {
        const auto it = closed_answers_.find(query);
        const bool answered = it != closed_answers_.end() && it->second.contains(trainer);
        return {false, answered ? RejectReason::duplicate : RejectReason::late};
    }
    if (!answers_.emplace(trainer, value).second) return {false, RejectReason::duplicate};
    cv_.notify_all();
    return {true, RejectReason::malformed};
}

std::size_t Session::subscribe(Sink sink) {
    std::lock_guard lock(mu_);
    sinks_.emplace(next_sink_, std::move(sink));
    return next_sink_++;
}

void Session::unsubscribe(std::size_t token) {
    std::lock_guard lock(mu_);
    sinks_.erase(token);
}

void Session::broadcast_locked(const Message& m) {
    for (const auto& [token, sink] : sinks_) {
        sink(m);
    }
}

void Session::start() {
    std::lock_guard lock(mu_);
    if (state_ == Lifecycle::finished) throw std::logic_error("session " + id_ + " is finished");
    if (state_ == Lifecycle::running) return;
    state_ = Lifecycle::running;
    broadcast_locked(summary_locked());
}

void Session::pause() {
    std::lock_guard lock(mu_);
    if (state_ != Lifecycle::running) throw std::logic_error("session " + id_ + " is not running");
    state_ = Lifecycle::paused;
    broadcast_locked(summary_locked());
}

FeedbackSet Session::gather_feedback(const StateAction& subject) {
    Lock lock(mu_);
    if (state_ != Lifecycle::running) throw std::logic_error("session " + id_ + " is not running");
    return gather_locked(lock, subject);
}

FeedbackSet Session::gather_locked(Lock& lock, const StateAction& subject) {
    open_query_ = QueryMessage{id_, next_query_++, subject, options_.map.to_json(), options_.deadline.count()};
    answers_.clear();
    broadcast_locked(*open_query_);

    const auto deadline = std::chrono::steady_clock::now() + options_.deadline;
    cv_.wait_until(lock, deadline, [&] {
        if (roster_.empty()) return false;
        for (const auto& t : roster_) {
            if (!answers_.contains(t)) return false;
        }
        return true;
    });

    FeedbackSet set;
    auto& answered = closed_answers_[open_query_->query_id];
    for (const auto& [trainer, value] : answers_) {
        set.add({trainer, value});
        answered.insert(trainer);
    }
    while (closed_answers_.size() > kClosedQueriesKept) {
        closed_answers_.erase(closed_answers_.begin());
    }
    open_query_.reset();
    answers_.clear();
    return set;
}

DecisionMessage Session::step() {
    Lock lock(mu_);
    if (state_ != Lifecycle::running) throw std::logic_error("session " + id_ + " is not running");
    const GridMap& map = options_.map;
    const LearnerConfig& cfg = options_.learner;
    const double epsilon = cfg.epsilon_at(static_cast<int>(episode_));
    if (!in_episode_) {
        s_ = sample_start(map, rng_);
        a_ = select_action(q_, s_, epsilon, rng_);
        t_ = 0;
        in_episode_ = true;
    }

    const StateAction subject{s_, a_};
    const StepResult moved = mtirl::step(map, s_, a_);
    std::optional<QueryId> query_id;
    const QueryFn query = [&](const StateAction& key) {
        query_id = next_query_;
        return gather_locked(lock, key);
    };
    const Resolution res = resolve(subject, archive_, store_, query, rng_);

    ++t_;
    ++steps_;
    queries_ += res.queried ? 1U : 0U;
    const double r = cfg.reward_value(res.decision.reward);
    if (moved.outcome != Outcome::ongoing) {
        sarsa_update(q_, s_, a_, r, std::nullopt, cfg);
    } else {
        const Action next = select_action(q_, moved.next, epsilon, rng_);
        sarsa_update(q_, s_, a_, r, StateAction{moved.next, next}, cfg);
        s_ = moved.next;
        a_ = next;
    }

    DecisionMessage msg;
    msg.session_id = id_;
    msg.query_id = query_id;
    msg.subject = subject;
    msg.decision = res.decision;
    msg.queried = res.queried;
    msg.episode = episode_;
    msg.step = steps_;
    for (const auto& [trainer, rec] : store_.records()) {
        msg.trust.emplace(trainer, snapshot_of(rec));
    }
    broadcast_locked(msg);

    if (moved.outcome != Outcome::ongoing) {
        end_episode_locked(moved.outcome);
    } else if (t_ >= cfg.max_actions) {
        end_episode_locked(Outcome::ongoing);
    }
    return msg;
}

void Session::end_episode_locked(Outcome /*outcome*/) {
    in_episode_ = false;
    ++episode_;
    const int max_actions = options_.learner.max_actions;
    if (episode_ % static_cast<std::size_t>(options_.check_every) == 0 && is_best_solution(q_, options_.map, max_actions)) {
        best_solution_ = true;
        state_ = Lifecycle::finished;
    } else if (episode_ >= static_cast<std::size_t>(options_.max_episodes)) {
        state_ = Lifecycle::finished;
    }
    if (state_ == Lifecycle::finished) {
        broadcast_locked(summary_locked());
    }
}

SessionStateMessage Session::summary_locked() const {
    SessionStateMessage m{id_, state_, episode_, steps_, queries_, roster_.size(), std::nullopt, best_solution_};
    if (state_ == Lifecycle::finished) {
        m.closeness = closeness(q_, options_.map, options_.learner.max_actions);
    }
    return m;
}

SessionStateMessage Session::summary() const {
    std::lock_guard lock(mu_);
    return summary_locked();
}

TrustStore Session::trust() const {
    std::lock_guard lock(mu_);
    return store_;
}

QTable Session::qtable() const {
    std::lock_guard lock(mu_);
    return q_;
}

std::size_t Session::archive_size() const {
    std::lock_guard lock(mu_);
    return archive_.size();
}

namespace {

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    return in;
}

}  // namespace

void Session::save(const fs::path& dir) const {
    std::lock_guard lock(mu_);
    fs::create_directories(dir);
    {
        auto out = open_out(dir / "trust.csv");
        store_.save_csv(out);
    }
    {
        auto out = open_out(dir / "archive.json");
        out << archive_.to_json() << '\n';
    }
    {
        auto out = open_out(dir / "qtable.csv");
        q_.save_csv(out);
    }
    std::ostringstream rng_state;
    rng_state << rng_;
    const json meta = {{"session_id", id_},
                       {"state", to_string(state_)},
                       {"episode", episode_},
                       {"steps", steps_},
                       {"queries", queries_},
                       {"next_query", next_query_},
                       {"best_solution", best_solution_},
                       {"in_episode", in_episode_},
                       {"position", {s_.x, s_.y}},
                       {"action", to_string(a_)},
                       {"episode_steps", t_},
                       {"rng", rng_state.str()}};
    auto out = open_out(dir / "session.json");
    out << meta.dump(2) << '\n';
}

std::unique_ptr<Session> Session::restore(std::string id, SessionOptions options, const fs::path& dir) {
    auto s = std::make_unique<Session>(std::move(id), std::move(options));
    {
        auto in = open_in(dir / "trust.csv");
        s->store_ = TrustStore::load_csv(in);
    }
    {
        auto in = open_in(dir / "archive.json");
        std::stringstream text;
        text << in.rdbuf();
        s->archive_ = FeedbackArchive::from_json(text.str(), s->store_);
    }
    {
        auto in = open_in(dir / "qtable.csv");
        s->q_ = QTable::load_csv(in);
    }
    if (s->q_.width() != s->options_.map.width() || s->q_.height() != s->options_.map.height()) {
        throw std::runtime_error("qtable.csv does not match the session map");
    }
    auto in = open_in(dir / "session.json");
    const json meta = json::parse(in);
    s->episode_ = meta.at("episode").get<std::size_t>();
    s->steps_ = meta.at("steps").get<std::size_t>();
    s->queries_ = meta.at("queries").get<std::size_t>();
    s->next_query_ = meta.at("next_query").get<QueryId>();
    s->best_solution_ = meta.at("best_solution").get<bool>();
    s->in_episode_ = meta.at("in_episode").get<bool>();
    s->s_ = {meta.at("position").at(0).get<int>(), meta.at("position").at(1).get<int>()};
    s->a_ = parse_action(meta.at("action").get<std::string>()).value_or(Action::up);
    s->t_ = meta.at("episode_steps").get<int>();
    std::istringstream rng_state(meta.at("rng").get<std::string>());
    rng_state >> s->rng_;
    s->state_ = meta.at("state").get<std::string>() == "finished" ? Lifecycle::finished : Lifecycle::paused;
    return s;
}

std::string SessionRegistry::open(SessionOptions options) {
    std::lock_guard lock(mu_);
    std::string id = "s" + std::to_string(next_id_++);
    sessions_.emplace(id, std::make_shared<Session>(id, std::move(options)));
    return id;
}

std::shared_ptr<Session> SessionRegistry::find(const std::string& id) const {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<Session>> SessionRegistry::list() const {
    std::lock_guard lock(mu_);
    std::vector<std::shared_ptr<Session>> out;
    for (const auto& [id, s] : sessions_) out.push_back(s);
    return out;
}

void SessionRegistry::adopt(std::shared_ptr<Session> session) {
    std::lock_guard lock(mu_);
    const std::string id = session->id();
    sessions_[id] = std::move(session);
}

}  // namespace mtirl::live
