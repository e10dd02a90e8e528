#include "mtirl/gridworld.hpp"

#include <nlohmann/json.hpp>

#include <deque>
#include <fstream>
#include <sstream>

namespace mtirl {

namespace {

constexpr std::array<char, kNumActions> kArrows{'^', 'v', '<', '>'};
constexpr std::array<std::string_view, kNumActions> kActionNames{"up", "down", "left", "right"};

AgentState moved(AgentState s, Action a) noexcept {
    switch (a) {
        case Action::up: return {s.x, s.y - 1};
        case Action::down: return {s.x, s.y + 1};
        case Action::left: return {s.x - 1, s.y};
        case Action::right: return {s.x + 1, s.y};
    }
    return s;
}

AgentState parse_cell(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw MapError(std::string("map: ") + what + " must be an [x, y] integer pair");
    }
    return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

std::string_view to_string(Action a) noexcept { return kActionNames[index_of(a)]; }

std::optional<Action> parse_action(std::string_view text) noexcept {
    for (Action a : kActions) {
        if (text == to_string(a)) {
            return a;
        }
    }
    return std::nullopt;
}

char arrow(Action a) noexcept { return kArrows[index_of(a)]; }

std::string to_string(const AgentState& s) {
    return "(" + std::to_string(s.x) + "," + std::to_string(s.y) + ")";
}

std::string_view to_string(Outcome o) noexcept {
    switch (o) {
        case Outcome::ongoing: return "continue";
        case Outcome::cliff: return "cliff";
        case Outcome::goal: return "goal";
    }
    return "continue";
}

GridMap::GridMap(int width, int height, AgentState goal, const std::vector<AgentState>& cliffs)
    : width_(width), height_(height), goal_(goal) {
    if (width <= 0 || height <= 0) {
        throw MapError("map: width and height must be positive");
    }
    if (!in_bounds(goal)) {
        throw MapError("map: goal " + to_string(goal) + " is outside the grid");
    }
    cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), CellKind::normal);
    cells_[index(goal)] = CellKind::goal;
    for (const AgentState& c : cliffs) {
        if (!in_bounds(c)) {
            throw MapError("map: cliff " + to_string(c) + " is outside the grid");
        }
        if (c == goal) {
            throw MapError("map: cliff " + to_string(c) + " coincides with the goal");
        }
        cells_[index(c)] = CellKind::cliff;
    }

    // Breadth-first search outward from the goal through normal cells.
    distance_.assign(cells_.size(), -1);
    distance_[index(goal)] = 0;
    std::deque<AgentState> frontier{goal};
    while (!frontier.empty()) {
        const AgentState c = frontier.front();
        frontier.pop_front();
        for (Action a : kActions) {
            const AgentState n = moved(c, a);
            if (!in_bounds(n) || cells_[index(n)] != CellKind::normal || distance_[index(n)] >= 0) {
                continue;
            }
            distance_[index(n)] = distance_[index(c)] + 1;
            frontier.push_back(n);
        }
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i] != CellKind::normal) {
            continue;
        }
        (distance_[i] > 0 ? start_pool_ : unreachable_).push_back(state_at(i));
    }
    if (start_pool_.empty()) {
        throw MapError("map: no normal cell can reach the goal " + to_string(goal));
    }
}

GridMap GridMap::from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw MapError(std::string("map: malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("width") || !j.contains("height") || !j.contains("goal")) {
        throw MapError("map: expected an object with width, height, goal and cliffs");
    }
    if (!j["width"].is_number_integer() || !j["height"].is_number_integer()) {
        throw MapError("map: width and height must be integers");
    }
    std::vector<AgentState> cliffs;
    if (j.contains("cliffs")) {
        if (!j["cliffs"].is_array()) {
            throw MapError("map: cliffs must be an array of [x, y] pairs");
        }
        for (const auto& c : j["cliffs"]) {
            cliffs.push_back(parse_cell(c, "cliff"));
        }
    }
    return GridMap(j["width"].get<int>(), j["height"].get<int>(), parse_cell(j["goal"], "goal"), cliffs);
}

GridMap GridMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw MapError("map: cannot open '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return from_json(text.str());
}

GridMap GridMap::default_map() {
    std::vector<AgentState> cliffs;
    for (int x = 3; x <= 8; ++x) {
        cliffs.push_back({x, 5});
    }
    for (int x = 1; x <= 8; ++x) {
        cliffs.push_back({x, 9});
    }
    return GridMap(10, 10, {9, 9}, cliffs);
}

std::string GridMap::to_json() const {
    nlohmann::json cliffs = nlohmann::json::array();
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i] == CellKind::cliff) {
            const AgentState s = state_at(i);
            cliffs.push_back({s.x, s.y});
        }
    }
    nlohmann::ordered_json j;
    j["width"] = width_;
    j["height"] = height_;
    j["goal"] = {goal_.x, goal_.y};
    j["cliffs"] = cliffs;
    return j.dump();
}

bool GridMap::in_bounds(AgentState s) const noexcept {
    return s.x >= 0 && s.y >= 0 && s.x < width_ && s.y < height_;
}

CellKind GridMap::kind(AgentState s) const {
    if (!in_bounds(s)) {
        throw std::out_of_range("cell " + to_string(s) + " is outside the grid");
    }
    return cells_[index(s)];
}

AgentState GridMap::state_at(std::size_t i) const noexcept {
    const auto w = static_cast<std::size_t>(width_);
    return {static_cast<int>(i % w), static_cast<int>(i / w)};
}

int GridMap::shortest_path_length(AgentState s) const {
    if (!in_bounds(s)) {
        throw std::out_of_range("cell " + to_string(s) + " is outside the grid");
    }
    return distance_[index(s)];
}

std::string GridMap::render_ascii() const {
    std::string out;
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            switch (cells_[index({x, y})]) {
                case CellKind::normal: out += '.'; break;
                case CellKind::cliff: out += '#'; break;
                case CellKind::goal: out += 'G'; break;
            }
        }
        out += '\n';
    }
    return out;
}

StepResult step(const GridMap& map, AgentState state, Action action) {
    AgentState next = moved(state, action);
    if (!map.in_bounds(next)) {
        next = state;
    }
    switch (map.kind(next)) {
        case CellKind::cliff: return {next, Outcome::cliff};
        case CellKind::goal: return {next, Outcome::goal};
        case CellKind::normal: break;
    }
    return {next, Outcome::ongoing};
}

AgentState sample_start(const GridMap& map, Rng& rng) {
    const auto& pool = map.start_pool();
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    return pool[pick(rng)];
}

}  // namespace mtirl
