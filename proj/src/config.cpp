#include "mtirl/config.hpp"

#include "csv_util.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mtirl {

namespace {

constexpr std::string_view kDeskPreset = R"(# Desk-scale preset: minutes on a laptop.
[aggregation]
n_questions = 1000
n_trainers = 50
response_prob = 0.1
trust_means = 0.55:0.95:0.05
trust_stds = 0, 0.2
repeats = 20
methods = bwve, bayes, weighted_vote, majority
base_rate = 0.6
seed = 20220101

[gridworld]
max_episodes = 500
n_trainers = 5
trust_std = 0.2
response_prob = 1
repeats = 20
variants = review, no_review, unlimited, single_trainer
trust_means = 0.6, 0.7, 0.8
base_rate = 0.6
check_every = 5
seed = 20220102

[learner]
learning_rate = 0.1
gamma = 0.5
epsilon_start = 0.1
epsilon_end = 0.01
epsilon_decay_episodes = 300
r_pos = 1
r_neg = -1
r_tie = 0
max_actions = 200
)";

constexpr std::string_view kFullPreset = R"(# Full-scale preset: every mean, six std groups, 100 repeats.
[aggregation]
n_questions = 1000
n_trainers = 50
response_prob = 0.1
trust_means = 0.51:1.00:0.01
trust_stds = 0, 0.1, 0.2, 0.3, 0.4, 0.5
repeats = 100
methods = bwve, bayes, weighted_vote, majority
base_rate = 0.6
seed = 20220101

[gridworld]
max_episodes = 500
n_trainers = 5
trust_std = 0.2
response_prob = 1
repeats = 100
variants = review, no_review, unlimited, single_trainer
trust_means = 0.51:1.00:0.01
base_rate = 0.6
check_every = 5
seed = 20220102

[learner]
learning_rate = 0.1
gamma = 0.5
epsilon_start = 0.1
epsilon_end = 0.01
epsilon_decay_episodes = 300
r_pos = 1
r_neg = -1
r_tie = 0
max_actions = 200
)";

std::string lower_section(std::string_view s) { return std::string(detail::trim(s)); }

template <class Fn>
auto field(const std::string& key, Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

template <class Fn>
void validated(Fn&& fn) {
    try {
        fn();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
    KeyValueConfig cfg;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = std::string_view(line);
        if (const auto hash = body.find('#'); hash != std::string_view::npos) {
            body = body.substr(0, hash);
        }
        body = detail::trim(body);
        if (body.empty()) {
            continue;
        }
        if (body.front() == '[') {
            if (body.back() != ']' || body.size() < 3) {
                throw ConfigError("config line " + std::to_string(line_no) + ": malformed section header");
            }
            section = lower_section(body.substr(1, body.size() - 2));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = std::string(detail::trim(body.substr(0, eq)));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        }
        cfg.values_[section.empty() ? key : section + "." + key] = std::string(detail::trim(body.substr(eq + 1)));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    auto cfg = parse(text.str());
    cfg.base_dir = std::filesystem::path(path).parent_path().string();
    return cfg;
}

const std::string& KeyValueConfig::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError(key + ": missing");
    }
    return it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return field(key, [&] { return detail::parse_double(raw(key), "value"); });
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    return field(key, [&] { return detail::parse_int(raw(key), "value"); });
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const long long v = get_int(key, 0);
    if (v < 0) {
        throw ConfigError(key + ": must be non-negative");
    }
    return static_cast<std::uint64_t>(v);
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& item : detail::split(raw(key), ',')) {
        const auto t = detail::trim(item);
        if (!t.empty()) {
            out.emplace_back(t);
        }
    }
    return out;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : get_list(key)) {
        const auto parts = detail::split(item, ':');
        if (parts.size() == 1) {
            out.push_back(field(key, [&] { return detail::parse_double(item, "value"); }));
            continue;
        }
        if (parts.size() != 3) {
            throw ConfigError(key + ": range must be lo:hi:step, got '" + item + "'");
        }
        const double lo = field(key, [&] { return detail::parse_double(parts[0], "lo"); });
        const double hi = field(key, [&] { return detail::parse_double(parts[1], "hi"); });
        const double step = field(key, [&] { return detail::parse_double(parts[2], "step"); });
        if (!(step > 0.0) || hi < lo) {
            throw ConfigError(key + ": range '" + item + "' needs step > 0 and hi >= lo");
        }
        const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
        for (long long k = 0; k <= n; ++k) {
            out.push_back(std::round((lo + static_cast<double>(k) * step) * 1e6) / 1e6);
        }
    }
    return out;
}

std::string KeyValueConfig::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::string KeyValueConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << h;
    return out.str();
}

AggExpConfig aggregation_config_from(const KeyValueConfig& kv) {
    AggExpConfig c;
    const std::string s = "aggregation.";
    c.n_questions = static_cast<std::size_t>(kv.get_u64(s + "n_questions", c.n_questions));
    c.n_trainers = static_cast<std::size_t>(kv.get_u64(s + "n_trainers", c.n_trainers));
    c.response_prob = kv.get_double(s + "response_prob", c.response_prob);
    if (kv.has(s + "trust_means")) c.trust_means = kv.get_double_list(s + "trust_means");
    if (kv.has(s + "trust_stds")) c.trust_stds = kv.get_double_list(s + "trust_stds");
    c.repeats = static_cast<std::size_t>(kv.get_u64(s + "repeats", c.repeats));
    if (kv.has(s + "methods")) {
        c.methods.clear();
        for (const auto& name : kv.get_list(s + "methods")) {
            const auto m = parse_method(name);
            if (!m) {
                throw ConfigError(s + "methods: unknown method '" + name + "'");
            }
            c.methods.push_back(*m);
        }
    }
    c.base_rate = kv.get_double(s + "base_rate", c.base_rate);
    c.seed = kv.get_u64(s + "seed", c.seed);
    validated([&] { c.validate(); });
    return c;
}

GridExpConfig gridworld_config_from(const KeyValueConfig& kv) {
    GridExpConfig c;
    const std::string s = "gridworld.";
    c.max_episodes = static_cast<int>(kv.get_int(s + "max_episodes", c.max_episodes));
    c.n_trainers = static_cast<std::size_t>(kv.get_u64(s + "n_trainers", c.n_trainers));
    c.trust_std = kv.get_double(s + "trust_std", c.trust_std);
    c.response_prob = kv.get_double(s + "response_prob", c.response_prob);
    c.repeats = static_cast<std::size_t>(kv.get_u64(s + "repeats", c.repeats));
    if (kv.has(s + "variants")) {
        c.variants.clear();
        for (const auto& name : kv.get_list(s + "variants")) {
            const auto v = parse_variant(name);
            if (!v) {
                throw ConfigError(s + "variants: unknown variant '" + name + "'");
            }
            c.variants.push_back(*v);
        }
    }
    if (kv.has(s + "trust_means")) c.trust_means = kv.get_double_list(s + "trust_means");
    c.base_rate = kv.get_double(s + "base_rate", c.base_rate);
    c.check_every = static_cast<int>(kv.get_int(s + "check_every", c.check_every));
    c.seed = kv.get_u64(s + "seed", c.seed);
    c.map_path = kv.get_string(s + "map", "");
    if (!c.map_path.empty() && !kv.base_dir.empty() && std::filesystem::path(c.map_path).is_relative()) {
        c.map_path = (std::filesystem::path(kv.base_dir) / c.map_path).string();
    }

    const std::string l = "learner.";
    auto& lc = c.learner;
    lc.learning_rate = kv.get_double(l + "learning_rate", lc.learning_rate);
    lc.gamma = kv.get_double(l + "gamma", lc.gamma);
    lc.epsilon_start = kv.get_double(l + "epsilon_start", lc.epsilon_start);
    lc.epsilon_end = kv.get_double(l + "epsilon_end", lc.epsilon_end);
    lc.epsilon_decay_episodes = static_cast<int>(kv.get_int(l + "epsilon_decay_episodes", lc.epsilon_decay_episodes));
    lc.r_pos = kv.get_double(l + "r_pos", lc.r_pos);
    lc.r_neg = kv.get_double(l + "r_neg", lc.r_neg);
    lc.r_tie = kv.get_double(l + "r_tie", lc.r_tie);
    lc.max_actions = static_cast<int>(kv.get_int(l + "max_actions", lc.max_actions));
    validated([&] { c.validate(); });
    return c;
}

std::string preset_text(std::string_view name) {
    if (name == "desk") return std::string(kDeskPreset);
    if (name == "full") return std::string(kFullPreset);
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected desk or full)");
}

}  // namespace mtirl
