#include "mtirl/qtable.hpp"

#include "csv_util.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

namespace mtirl {

QTable::QTable(int width, int height, double init) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("QTable: dimensions must be positive");
    }
    values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * kNumActions, init);
}

double QTable::max_value(AgentState s) const {
    const auto r = row(s);
    return *std::max_element(r.begin(), r.end());
}

Action QTable::greedy_action(AgentState s) const {
    const auto r = row(s);
    // max_element returns the first maximum, i.e. the fixed action order.
    return kActions[static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin())];
}

void QTable::save_csv(std::ostream& out) const {
    out << "state_x,state_y,action,value\n";
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            for (Action a : kActions) {
                out << x << ',' << y << ',' << to_string(a) << ',' << detail::shortest((*this)({x, y}, a)) << '\n';
            }
        }
    }
}

QTable QTable::load_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "state_x,state_y,action,value") {
        throw std::invalid_argument("Q-table CSV: missing header 'state_x,state_y,action,value'");
    }
    struct Row {
        StateAction key;
        double value;
    };
    std::vector<Row> rows;
    int width = 0;
    int height = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto cols = detail::split(detail::trim(line), ',');
        if (cols.size() != 4) {
            throw std::invalid_argument("Q-table CSV: expected 4 columns in '" + line + "'");
        }
        const auto x = static_cast<int>(detail::parse_int(cols[0], "state_x"));
        const auto y = static_cast<int>(detail::parse_int(cols[1], "state_y"));
        const auto a = parse_action(cols[2]);
        if (!a || x < 0 || y < 0) {
            throw std::invalid_argument("Q-table CSV: bad row '" + line + "'");
        }
        rows.push_back({{{x, y}, *a}, detail::parse_double(cols[3], "value")});
        width = std::max(width, x + 1);
        height = std::max(height, y + 1);
    }
    if (rows.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * kNumActions) {
        throw std::invalid_argument("Q-table CSV: rows do not cover the full state-action space");
    }
    QTable q(width, height);
    for (const Row& r : rows) {
        q(r.key.state, r.key.action) = r.value;
    }
    return q;
}

}  // namespace mtirl
