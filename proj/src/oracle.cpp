#include "mtirl/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace mtirl {

namespace {

double transition_reward(Outcome o, const OracleRewards& r) noexcept {
    switch (o) {
        case Outcome::cliff: return r.cliff;
        case Outcome::goal: return r.goal;
        case Outcome::ongoing: break;
    }
    return r.step;
}

double backup(const GridMap& map, const QTable& q, AgentState s, Action a, const OracleRewards& r) {
    const StepResult next = step(map, s, a);
    const double bootstrap = next.outcome == Outcome::ongoing ? q.max_value(next.next) : 0.0;
    return transition_reward(next.outcome, r) + r.gamma * bootstrap;
}

}  // namespace

QTable optimal_q(const GridMap& map, const OracleRewards& rewards) {
    if (!(rewards.gamma > 0.0 && rewards.gamma < 1.0)) {
        throw std::invalid_argument("optimal_q: gamma must lie in (0, 1)");
    }
    constexpr double kTolerance = 1e-10;
    constexpr int kMaxSweeps = 100000;
    QTable q(map);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        // Synchronous (Jacobi) sweep: deterministic regardless of cell order.
        QTable next(map);
        double change = 0.0;
        for (std::size_t i = 0; i < map.num_cells(); ++i) {
            const AgentState s = map.state_at(i);
            if (map.is_terminal(s)) {
                continue;
            }
            for (Action a : kActions) {
                next(s, a) = backup(map, q, s, a, rewards);
                change = std::max(change, std::abs(next(s, a) - q(s, a)));
            }
        }
        q = std::move(next);
        if (change < kTolerance) {
            return q;
        }
    }
    throw std::runtime_error("optimal_q: value iteration did not converge");
}

double bellman_residual(const GridMap& map, const QTable& q, const OracleRewards& rewards) {
    double worst = 0.0;
    for (std::size_t i = 0; i < map.num_cells(); ++i) {
        const AgentState s = map.state_at(i);
        if (map.is_terminal(s)) {
            continue;
        }
        for (Action a : kActions) {
            worst = std::max(worst, std::abs(q(s, a) - backup(map, q, s, a, rewards)));
        }
    }
    return worst;
}

bool is_best_action(const QTable& optimal, AgentState state, Action action) {
    return optimal(state, action) >= optimal.max_value(state) - kBestActionTolerance;
}

std::optional<int> greedy_path_length(const GridMap& map, const QTable& q, AgentState start, int max_actions) {
    AgentState s = start;
    for (int n = 1; n <= max_actions; ++n) {
        const StepResult r = step(map, s, q.greedy_action(s));
        if (r.outcome == Outcome::goal) {
            return n;
        }
        if (r.outcome == Outcome::cliff) {
            return std::nullopt;
        }
        s = r.next;
    }
    return std::nullopt;
}

std::string render_policy(const GridMap& map, const QTable& q) {
    std::string out;
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            switch (map.kind({x, y})) {
                case CellKind::cliff: out += '#'; break;
                case CellKind::goal: out += 'G'; break;
                case CellKind::normal: out += arrow(q.greedy_action({x, y})); break;
            }
        }
        out += '\n';
    }
    return out;
}

}  // namespace mtirl
