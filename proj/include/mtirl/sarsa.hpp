#pragma once

#include "mtirl/aggregate.hpp"
#include "mtirl/gridworld.hpp"
#include "mtirl/qtable.hpp"
#include "mtirl/random.hpp"

#include <functional>
#include <vector>

namespace mtirl {

struct LearnerConfig {
    double learning_rate = 0.1;
    double gamma = 0.5;
    double epsilon_start = 0.1;
    double epsilon_end = 0.01;
    int epsilon_decay_episodes = 300;
    double r_pos = 1.0;
    double r_neg = -1.0;
    double r_tie = 0.0;
    int max_actions = 200;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    /// Linear decay from epsilon_start to epsilon_end.
    [[nodiscard]] double epsilon_at(int episode) const noexcept;
    [[nodiscard]] double reward_value(Reward r) const noexcept;
};

/// ε-greedy; the greedy branch breaks ties uniformly at random.
Action select_action(const QTable& q, AgentState state, double epsilon, Rng& rng);

/// Q(s,a) += lr·(r + γ·Q(s',a') − Q(s,a)); `next` empty means terminal (bootstrap 0).
void sarsa_update(QTable& q, AgentState s, Action a, double reward, std::optional<StateAction> next,
                  const LearnerConfig& config);

/// What the reward path reports for one step.
struct RewardSignal {
    Reward reward = Reward::tie;
    bool queried = false;
};

using RewardSource = std::function<RewardSignal(const StateAction&)>;

struct EpisodeStep {
    StateAction taken;
    Reward reward = Reward::tie;
    bool queried = false;

    friend bool operator==(const EpisodeStep&, const EpisodeStep&) = default;
};

struct EpisodeLog {
    AgentState start;
    std::vector<EpisodeStep> steps;
    Outcome outcome = Outcome::ongoing;  // ongoing = truncated at max_actions
    std::size_t queries = 0;

    friend bool operator==(const EpisodeLog&, const EpisodeLog&) = default;
};

/// One episode of interactive SARSA from `start` with rewards from `rewards`.
EpisodeLog run_episode(const GridMap& map, QTable& q, const LearnerConfig& config, const RewardSource& rewards,
                       AgentState start, double epsilon, Rng& rng);

/// Samples the start from the map's pool, then runs the episode.
EpisodeLog run_episode(const GridMap& map, QTable& q, const LearnerConfig& config, const RewardSource& rewards,
                       double epsilon, Rng& rng);

}  // namespace mtirl
