#pragma once

#include "mtirl/gridworld.hpp"
#include "mtirl/qtable.hpp"

namespace mtirl {

struct OracleRewards {
    double step = -1.0;
    double cliff = -100.0;
    double goal = 0.0;
    double gamma = 0.99;
};

/// Exact optimal action values by value iteration (sup-norm change < 1e-10).
/// Terminal cells keep Q = 0.
QTable optimal_q(const GridMap& map, const OracleRewards& rewards = {});

/// Largest |Q(s,a) - (r + γ max Q(s',·))| over non-terminal state-actions.
double bellman_residual(const GridMap& map, const QTable& q, const OracleRewards& rewards = {});

inline constexpr double kBestActionTolerance = 1e-9;

/// True iff Q*(s,a) is within 1e-9 of the best value at s (ties all count).
bool is_best_action(const QTable& optimal, AgentState state, Action action);

/// Steps the greedy policy needs to reach the goal from `start`, or nullopt
/// if it does not arrive within `max_actions` (loops, cliffs).
std::optional<int> greedy_path_length(const GridMap& map, const QTable& q, AgentState start, int max_actions);

/// ASCII policy: greedy arrow per normal cell, '#' cliff, 'G' goal.
std::string render_policy(const GridMap& map, const QTable& q);

}  // namespace mtirl
