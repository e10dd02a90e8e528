#pragma once

#include "mtirl/gridworld.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace mtirl {

/// Tabular action values over a map's full state-action space, default 0.
class QTable {
public:
    QTable() = default;
    QTable(int width, int height, double init = 0.0);
    explicit QTable(const GridMap& map, double init = 0.0) : QTable(map.width(), map.height(), init) {}

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }

    [[nodiscard]] double operator()(AgentState s, Action a) const { return values_[slot(s, a)]; }
    double& operator()(AgentState s, Action a) { return values_[slot(s, a)]; }

    [[nodiscard]] std::span<const double, kNumActions> row(AgentState s) const {
        return std::span<const double, kNumActions>(values_.data() + slot(s, Action::up), kNumActions);
    }
    [[nodiscard]] double max_value(AgentState s) const;
    /// Argmax with ties resolved by the fixed order up, down, left, right.
    [[nodiscard]] Action greedy_action(AgentState s) const;

    /// CSV `state_x,state_y,action,value`, one row per state-action, exact round trip.
    void save_csv(std::ostream& out) const;
    static QTable load_csv(std::istream& in);

    friend bool operator==(const QTable&, const QTable&) = default;

private:
    [[nodiscard]] std::size_t slot(AgentState s, Action a) const noexcept {
        return (static_cast<std::size_t>(s.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(s.x)) *
                   kNumActions +
               index_of(a);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

}  // namespace mtirl
