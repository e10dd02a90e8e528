#pragma once

#include "mtirl/random.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mtirl {

enum class Action : std::uint8_t { up, down, left, right };

inline constexpr std::size_t kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kActions{Action::up, Action::down, Action::left,
                                                          Action::right};

constexpr std::size_t index_of(Action a) noexcept { return static_cast<std::size_t>(a); }
std::string_view to_string(Action a) noexcept;
std::optional<Action> parse_action(std::string_view text) noexcept;
char arrow(Action a) noexcept;

/// Cell coordinates; x is the column, y the row (y = 0 is the top row).
struct AgentState {
    int x = 0;
    int y = 0;

    friend auto operator<=>(const AgentState&, const AgentState&) = default;
};

std::string to_string(const AgentState& s);

struct StateAction {
    AgentState state;
    Action action = Action::up;

    friend auto operator<=>(const StateAction&, const StateAction&) = default;
};

enum class CellKind : std::uint8_t { normal, cliff, goal };

enum class Outcome : std::uint8_t { ongoing, cliff, goal };

std::string_view to_string(Outcome o) noexcept;

class MapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rectangular cliff world with a single goal. Cliff and goal cells are
/// terminal. The start pool holds every normal cell that can reach the goal
/// without crossing a cliff.
class GridMap {
public:
    GridMap(int width, int height, AgentState goal, const std::vector<AgentState>& cliffs);

    /// Parses `{"width":W,"height":H,"goal":[x,y],"cliffs":[[x,y],...]}`.
    static GridMap from_json(std::string_view text);
    static GridMap load(const std::string& path);
    /// The bundled 10x10 layout: goal bottom-right, two cliff barriers.
    static GridMap default_map();

    [[nodiscard]] std::string to_json() const;

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] AgentState goal() const noexcept { return goal_; }
    [[nodiscard]] std::size_t num_cells() const noexcept { return cells_.size(); }
    [[nodiscard]] bool in_bounds(AgentState s) const noexcept;
    [[nodiscard]] CellKind kind(AgentState s) const;
    [[nodiscard]] bool is_terminal(AgentState s) const { return kind(s) != CellKind::normal; }
    [[nodiscard]] std::size_t index(AgentState s) const noexcept {
        return static_cast<std::size_t>(s.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(s.x);
    }
    [[nodiscard]] AgentState state_at(std::size_t index) const noexcept;

    [[nodiscard]] const std::vector<AgentState>& start_pool() const noexcept { return start_pool_; }
    /// Normal cells from which the goal cannot be reached (excluded from the pool).
    [[nodiscard]] const std::vector<AgentState>& unreachable_cells() const noexcept { return unreachable_; }
    /// Shortest safe path length to the goal from every cell; -1 if unreachable.
    [[nodiscard]] int shortest_path_length(AgentState s) const;

    /// One character per cell: '.' normal, '#' cliff, 'G' goal.
    [[nodiscard]] std::string render_ascii() const;

    friend bool operator==(const GridMap& a, const GridMap& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.cells_ == b.cells_;
    }

private:
    int width_;
    int height_;
    AgentState goal_;
    std::vector<CellKind> cells_;
    std::vector<int> distance_;
    std::vector<AgentState> start_pool_;
    std::vector<AgentState> unreachable_;
};

struct StepResult {
    AgentState next;
    Outcome outcome = Outcome::ongoing;

    friend bool operator==(const StepResult&, const StepResult&) = default;
};

/// Deterministic move. Bumping into the border leaves the state unchanged.
StepResult step(const GridMap& map, AgentState state, Action action);

/// Uniform draw from the start pool.
AgentState sample_start(const GridMap& map, Rng& rng);

}  // namespace mtirl
