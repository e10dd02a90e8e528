#include "mtirl/sarsa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtirl {

void LearnerConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& rule) {
        throw std::invalid_argument("learner." + field + ": " + rule);
    };
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) fail("learning_rate", "must lie in (0, 1]");
    if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma", "must lie in (0, 1)");
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0)) fail("epsilon_start", "must lie in [0, 1]");
    if (!(epsilon_end >= 0.0 && epsilon_end <= 1.0)) fail("epsilon_end", "must lie in [0, 1]");
    if (epsilon_end > epsilon_start) fail("epsilon_end", "must not exceed epsilon_start");
    if (epsilon_decay_episodes < 0) fail("epsilon_decay_episodes", "must be >= 0");
    if (!std::isfinite(r_pos) || !std::isfinite(r_neg) || !std::isfinite(r_tie)) fail("r_pos", "rewards must be finite");
    if (max_actions <= 0) fail("max_actions", "must be positive");
}

double LearnerConfig::epsilon_at(int episode) const noexcept {
    if (epsilon_decay_episodes <= 0 || episode >= epsilon_decay_episodes) {
        return epsilon_end;
    }
    const double frac = static_cast<double>(episode) / static_cast<double>(epsilon_decay_episodes);
    return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

double LearnerConfig::reward_value(Reward r) const noexcept {
    switch (r) {
        case Reward::positive: return r_pos;
        case Reward::negative: return r_neg;
        case Reward::tie: return r_tie;
    }
    return r_tie;
}

Action select_action(const QTable& q, AgentState state, double epsilon, Rng& rng) {
    if (uniform01(rng) < epsilon) {
        return kActions[std::uniform_int_distribution<std::size_t>(0, kNumActions - 1)(rng)];
    }
    const auto values = q.row(state);
    const double best = *std::max_element(values.begin(), values.end());
    std::array<Action, kNumActions> ties{};
    std::size_t n = 0;
    for (Action a : kActions) {
        if (values[index_of(a)] == best) {
            ties[n++] = a;
        }
    }
    if (n == 1) {
        return ties[0];
    }
    return ties[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)];
}

void sarsa_update(QTable& q, AgentState s, Action a, double reward, std::optional<StateAction> next,
                  const LearnerConfig& config) {
    const double bootstrap = next ? q(next->state, next->action) : 0.0;
    double& value = q(s, a);
    value += config.learning_rate * (reward + config.gamma * bootstrap - value);
}

EpisodeLog run_episode(const GridMap& map, QTable& q, const LearnerConfig& config, const RewardSource& rewards,
                       AgentState start, double epsilon, Rng& rng) {
    EpisodeLog log;
    log.start = start;
    AgentState s = start;
    Action a = select_action(q, s, epsilon, rng);
    for (int t = 0; t < config.max_actions; ++t) {
        const StepResult moved = step(map, s, a);
        const RewardSignal signal = rewards({s, a});
        log.steps.push_back({{s, a}, signal.reward, signal.queried});
        log.queries += signal.queried ? 1U : 0U;
        const double r = config.reward_value(signal.reward);
        if (moved.outcome != Outcome::ongoing) {
            sarsa_update(q, s, a, r, std::nullopt, config);
            log.outcome = moved.outcome;
            return log;
        }
        const Action next_action = select_action(q, moved.next, epsilon, rng);
        sarsa_update(q, s, a, r, StateAction{moved.next, next_action}, config);
        s = moved.next;
        a = next_action;
    }
    log.outcome = Outcome::ongoing;
    return log;
}

EpisodeLog run_episode(const GridMap& map, QTable& q, const LearnerConfig& config, const RewardSource& rewards,
                       double epsilon, Rng& rng) {
    const AgentState start = sample_start(map, rng);
    return run_episode(map, q, config, rewards, start, epsilon, rng);
}

}  // namespace mtirl
