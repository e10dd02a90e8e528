#include "mtirl/experiments.hpp"

#include "mtirl/memory.hpp"
#include "mtirl/oracle.hpp"
#include "mtirl/sim_trainers.hpp"
#include "mtirl/stats.hpp"

#include "csv_util.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace mtirl {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& rule) {
    throw std::invalid_argument(field + ": " + rule);
}

void check_probability_list(const std::vector<double>& values, const std::string& field) {
    if (values.empty()) {
        invalid(field, "must not be empty");
    }
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            invalid(field, "value " + format_double(v) + " outside [0, 1]");
        }
    }
}

// Stream key for a real-valued grid coordinate.
std::uint64_t key_of(double v) { return static_cast<std::uint64_t>(std::llround(v * 1e6)); }

constexpr std::uint64_t kPopulationStream = 1;
constexpr std::uint64_t kLearningStream = 2;

}  // namespace

std::vector<double> trust_mean_grid(int first_percent, int last_percent, int step_percent) {
    if (step_percent <= 0) {
        throw std::invalid_argument("trust_mean_grid: step must be positive");
    }
    std::vector<double> out;
    for (int p = first_percent; p <= last_percent; p += step_percent) {
        out.push_back(p / 100.0);
    }
    return out;
}

std::string format_double(double v) { return detail::shortest(v); }

// ---------------------------------------------------------------------------
// Aggregation experiment
// ---------------------------------------------------------------------------

AggExpConfig AggExpConfig::desk() {
    AggExpConfig c;
    c.trust_means = trust_mean_grid(55, 95, 5);
    c.trust_stds = {0.0, 0.2};
    c.repeats = 20;
    return c;
}

void AggExpConfig::validate() const {
    if (n_questions == 0) invalid("aggregation.n_questions", "must be positive");
    if (n_trainers == 0) invalid("aggregation.n_trainers", "must be positive");
    if (repeats == 0) invalid("aggregation.repeats", "must be positive");
    if (!(response_prob >= 0.0 && response_prob <= 1.0)) invalid("aggregation.response_prob", "must lie in [0, 1]");
    if (!(base_rate >= 0.0 && base_rate <= 1.0)) invalid("aggregation.base_rate", "must lie in [0, 1]");
    check_probability_list(trust_means, "aggregation.trust_means");
    if (trust_stds.empty()) invalid("aggregation.trust_stds", "must not be empty");
    for (double s : trust_stds) {
        if (!(s >= 0.0) || !std::isfinite(s)) invalid("aggregation.trust_stds", "values must be finite and >= 0");
    }
    if (methods.empty()) invalid("aggregation.methods", "must not be empty");
}

namespace {

std::uint64_t world_seed_of(const AggExpConfig& config, double mean, double std_dev, std::size_t repeat) {
    return derive_seed(config.seed, {key_of(mean), key_of(std_dev), repeat});
}

}  // namespace

std::vector<TrainerProfile> aggregation_population(const AggExpConfig& config, double mean, double std_dev,
                                                   std::size_t repeat) {
    Rng rng(world_seed_of(config, mean, std_dev, repeat));
    return sample_population(config.n_trainers, mean, std_dev, config.response_prob, rng);
}

RunResult run_aggregation_cell(const AggExpConfig& config, Method method, double mean, double std_dev,
                               std::size_t repeat) {
    // The world stream ignores the method: every method sees the same trainers,
    // answer key, responses and tie coins.
    const std::uint64_t world_seed = world_seed_of(config, mean, std_dev, repeat);
    Rng rng(world_seed);
    const auto population = sample_population(config.n_trainers, mean, std_dev, config.response_prob, rng);

    TrustStore store;
    for (const auto& p : population) {
        store.ensure(p.id, config.base_rate);
    }

    RunResult r;
    r.label = std::string(to_string(method));
    r.trust_mean = mean;
    r.trust_std = std_dev;
    r.repeat = repeat;
    r.seed = world_seed;
    r.n_queries = config.n_questions;

    std::size_t correct = 0;
    for (std::size_t q = 0; q < config.n_questions; ++q) {
        const Vote truth = uniform01(rng) < 0.5 ? Vote::positive : Vote::negative;
        const Vote coin = uniform01(rng) < 0.5 ? Vote::positive : Vote::negative;
        FeedbackSet feedback;
        for (const auto& p : population) {
            if (auto event = give_feedback(p, truth, rng)) {
                feedback.add(std::move(*event));
            }
        }
        const Decision d = decide(method, feedback, store);
        Vote answer = coin;
        if (d.reward == Reward::positive) {
            answer = Vote::positive;
        } else if (d.reward == Reward::negative) {
            answer = Vote::negative;
        }
        const bool right = answer == truth;
        correct += right ? 1U : 0U;
        r.n_steps += feedback.size();
        if (!feedback.empty()) {
            ++r.answered;
            r.answered_correct += right ? 1U : 0U;
        }
        if (uses_trust(method)) {
            apply_evidence_updates(d, feedback, store);
        }
    }
    r.score = static_cast<double>(correct) / static_cast<double>(config.n_questions);
    r.best_solution = correct == config.n_questions;
    return r;
}

std::vector<RunResult> run_aggregation_experiment(const AggExpConfig& config, Execution exec, int jobs) {
    config.validate();
    const std::size_t n_means = config.trust_means.size();
    const std::size_t n_stds = config.trust_stds.size();
    const std::size_t total = config.methods.size() * n_means * n_stds * config.repeats;
    std::vector<RunResult> results(total);
    for_each_cell(total, exec, jobs, [&](std::size_t cell) {
        std::size_t rest = cell;
        const std::size_t repeat = rest % config.repeats;
        rest /= config.repeats;
        const std::size_t std_idx = rest % n_stds;
        rest /= n_stds;
        const std::size_t mean_idx = rest % n_means;
        const std::size_t method_idx = rest / n_means;
        results[cell] = run_aggregation_cell(config, config.methods[method_idx], config.trust_means[mean_idx],
                                             config.trust_stds[std_idx], repeat);
    });
    return results;
}

// ---------------------------------------------------------------------------
// Grid-world experiment
// ---------------------------------------------------------------------------

std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::review: return "review";
        case Variant::no_review: return "no_review";
        case Variant::unlimited: return "unlimited";
        case Variant::single_trainer: return "single_trainer";
    }
    return "review";
}

std::optional<Variant> parse_variant(std::string_view text) noexcept {
    for (Variant v : {Variant::review, Variant::no_review, Variant::unlimited, Variant::single_trainer}) {
        if (text == to_string(v)) {
            return v;
        }
    }
    return std::nullopt;
}

GridExpConfig GridExpConfig::desk() {
    GridExpConfig c;
    c.trust_means = {0.6, 0.7, 0.8};
    c.repeats = 20;
    return c;
}

void GridExpConfig::validate() const {
    if (max_episodes <= 0) invalid("gridworld.max_episodes", "must be positive");
    if (n_trainers == 0) invalid("gridworld.n_trainers", "must be positive");
    if (repeats == 0) invalid("gridworld.repeats", "must be positive");
    if (check_every <= 0) invalid("gridworld.check_every", "must be positive");
    if (!(trust_std >= 0.0) || !std::isfinite(trust_std)) invalid("gridworld.trust_std", "must be finite and >= 0");
    if (!(response_prob >= 0.0 && response_prob <= 1.0)) invalid("gridworld.response_prob", "must lie in [0, 1]");
    if (!(base_rate >= 0.0 && base_rate <= 1.0)) invalid("gridworld.base_rate", "must lie in [0, 1]");
    check_probability_list(trust_means, "gridworld.trust_means");
    if (variants.empty()) invalid("gridworld.variants", "must not be empty");
    learner.validate();
}

double closeness(const QTable& learned, const GridMap& map, int max_actions) {
    const auto& pool = map.start_pool();
    double sum = 0.0;
    for (const AgentState& s : pool) {
        if (const auto len = greedy_path_length(map, learned, s, max_actions)) {
            sum += static_cast<double>(map.shortest_path_length(s)) / static_cast<double>(*len);
        }
    }
    return sum / static_cast<double>(pool.size());
}

bool is_best_solution(const QTable& learned, const GridMap& map, int max_actions) {
    for (const AgentState& s : map.start_pool()) {
        const auto len = greedy_path_length(map, learned, s, max_actions);
        if (!len || *len != map.shortest_path_length(s)) {
            return false;
        }
    }
    return true;
}

RunResult run_gridworld_cell(const GridExpConfig& config, const GridMap& map, const QTable& optimal,
                             Variant variant, double mean, std::size_t repeat) {
    // Populations are shared across variants for the same (mean, repeat).
    const std::uint64_t pop_seed = derive_seed(config.seed, {kPopulationStream, key_of(mean), repeat});
    const std::uint64_t run_seed =
        derive_seed(config.seed, {kLearningStream, static_cast<std::uint64_t>(variant), key_of(mean), repeat});
    Rng pop_rng(pop_seed);
    Rng rng(run_seed);

    std::vector<TrainerProfile> trainers;
    if (variant == Variant::single_trainer) {
        trainers.push_back({"t0", mean, config.response_prob});
    } else {
        trainers = sample_population(config.n_trainers, mean, config.trust_std, config.response_prob, pop_rng);
    }
    TrustStore store;
    for (const auto& t : trainers) {
        store.ensure(t.id, config.base_rate);
    }
    FeedbackArchive archive;

    const QueryFn query = [&](const StateAction& key) {
        const Vote truth = gridworld_truth(optimal, key.state, key.action);
        FeedbackSet set;
        for (const auto& t : trainers) {
            if (auto e = give_feedback(t, truth, rng)) {
                set.add(std::move(*e));
            }
        }
        return set;
    };

    RewardSource source;
    switch (variant) {
        case Variant::review:
        case Variant::no_review: {
            const ResolveOptions options{variant == Variant::review};
            source = [&, options](const StateAction& key) {
                const Resolution res = resolve(key, archive, store, query, rng, options);
                return RewardSignal{res.decision.reward, res.queried};
            };
            break;
        }
        case Variant::unlimited:
            source = [&](const StateAction& key) {
                const FeedbackSet fresh = query(key);
                const Decision d = bwve_decide(fresh, store);
                apply_evidence_updates(d, fresh, store);
                return RewardSignal{d.reward, true};
            };
            break;
        case Variant::single_trainer:
            source = [&](const StateAction& key) {
                const FeedbackSet fresh = query(key);
                if (fresh.empty()) {
                    return RewardSignal{Reward::tie, true};
                }
                const Vote v = fresh.events().front().value;
                return RewardSignal{v == Vote::positive ? Reward::positive : Reward::negative, true};
            };
            break;
    }

    RunResult r;
    r.label = std::string(to_string(variant));
    r.trust_mean = mean;
    r.trust_std = config.trust_std;
    r.repeat = repeat;
    r.seed = run_seed;

    QTable q(map);
    const int max_actions = config.learner.max_actions;
    for (int episode = 0; episode < config.max_episodes; ++episode) {
        const EpisodeLog log = run_episode(map, q, config.learner, source, config.learner.epsilon_at(episode), rng);
        ++r.episodes;
        r.n_steps += log.steps.size();
        r.n_queries += log.queries;
        switch (log.outcome) {
            case Outcome::goal: ++r.goal_episodes; break;
            case Outcome::cliff: ++r.cliff_episodes; break;
            case Outcome::ongoing: ++r.truncated_episodes; break;
        }
        if ((episode + 1) % config.check_every == 0 && is_best_solution(q, map, max_actions)) {
            r.best_solution = true;
            break;
        }
    }
    if (!r.best_solution) {
        r.best_solution = is_best_solution(q, map, max_actions);
    }
    r.score = closeness(q, map, max_actions);
    return r;
}

std::vector<RunResult> run_gridworld_experiment(const GridExpConfig& config, const GridMap& map, Execution exec,
                                                int jobs) {
    config.validate();
    const QTable optimal = optimal_q(map);
    const std::size_t n_means = config.trust_means.size();
    const std::size_t total = config.variants.size() * n_means * config.repeats;
    std::vector<RunResult> results(total);
    for_each_cell(total, exec, jobs, [&](std::size_t cell) {
        const std::size_t repeat = cell % config.repeats;
        const std::size_t mean_idx = (cell / config.repeats) % n_means;
        const std::size_t variant_idx = cell / (config.repeats * n_means);
        results[cell] = run_gridworld_cell(config, map, optimal, config.variants[variant_idx],
                                           config.trust_means[mean_idx], repeat);
    });
    return results;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

namespace {

void write_header(std::ostream& out, const OutputHeader& h) {
    out << "# experiment=" << h.experiment << " config_hash=" << h.config_hash << " seed=" << h.seed << '\n';
}

struct CellKey {
    std::string label;
    double mean;
    double std_dev;

    friend bool operator==(const CellKey&, const CellKey&) = default;
};

// Groups rows by (label, mean, std), keeping first-appearance order.
std::vector<std::pair<CellKey, std::vector<const RunResult*>>> group_rows(const std::vector<RunResult>& rows) {
    std::vector<std::pair<CellKey, std::vector<const RunResult*>>> groups;
    for (const auto& r : rows) {
        const CellKey key{r.label, r.trust_mean, r.trust_std};
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
        if (it == groups.end()) {
            groups.push_back({key, {}});
            it = std::prev(groups.end());
        }
        it->second.push_back(&r);
    }
    return groups;
}

}  // namespace

void write_results_csv(std::ostream& out, const OutputHeader& header, const std::vector<RunResult>& rows,
                       bool gridworld) {
    write_header(out, header);
    if (gridworld) {
        out << "variant,trust_mean,trust_std,repeat,closeness,best_solution,n_queries,n_steps,episodes,seed\n";
    } else {
        out << "method,trust_mean,trust_std,repeat,accuracy,best_solution,n_queries,n_steps,answered,"
               "answered_correct,seed\n";
    }
    for (const auto& r : rows) {
        out << r.label << ',' << format_double(r.trust_mean) << ',' << format_double(r.trust_std) << ',' << r.repeat
            << ',' << format_double(r.score) << ',' << (r.best_solution ? 1 : 0) << ',' << r.n_queries << ','
            << r.n_steps << ',';
        if (gridworld) {
            out << r.episodes << ',' << r.seed << '\n';
        } else {
            out << r.answered << ',' << r.answered_correct << ',' << r.seed << '\n';
        }
    }
}

void write_summary_csv(std::ostream& out, const OutputHeader& header, const std::vector<RunResult>& rows,
                       bool gridworld) {
    write_header(out, header);
    out << (gridworld ? "variant" : "method") << ",trust_mean,trust_std,n," << (gridworld ? "closeness" : "accuracy")
        << "_mean,ci_low,ci_high,best_rate,mean_queries,mean_steps\n";
    for (const auto& [key, members] : group_rows(rows)) {
        std::vector<double> scores;
        double best = 0.0;
        double queries = 0.0;
        double steps = 0.0;
        for (const RunResult* r : members) {
            scores.push_back(r->score);
            best += r->best_solution ? 1.0 : 0.0;
            queries += static_cast<double>(r->n_queries);
            steps += static_cast<double>(r->n_steps);
        }
        const auto n = static_cast<double>(members.size());
        const auto s = stats::summarize(scores);
        out << key.label << ',' << format_double(key.mean) << ',' << format_double(key.std_dev) << ',' << s.n << ','
            << format_double(s.mean) << ',' << format_double(s.ci_low) << ',' << format_double(s.ci_high) << ','
            << format_double(best / n) << ',' << format_double(queries / n) << ',' << format_double(steps / n)
            << '\n';
    }
}

void write_episode_summary_csv(std::ostream& out, const OutputHeader& header, const std::vector<RunResult>& rows) {
    write_header(out, header);
    out << "variant,trust_mean,trust_std,repeat,episodes,goal_episodes,cliff_episodes,truncated_episodes,n_steps,"
           "n_queries\n";
    for (const auto& r : rows) {
        out << r.label << ',' << format_double(r.trust_mean) << ',' << format_double(r.trust_std) << ',' << r.repeat
            << ',' << r.episodes << ',' << r.goal_episodes << ',' << r.cliff_episodes << ',' << r.truncated_episodes
            << ',' << r.n_steps << ',' << r.n_queries << '\n';
    }
}

std::vector<PairwiseCount> significance_matrix(const std::vector<RunResult>& rows, double alpha) {
    std::vector<std::string> labels;
    std::vector<std::pair<double, double>> cells;
    std::map<std::tuple<std::string, double, double>, std::vector<double>> scores;
    for (const auto& r : rows) {
        if (std::find(labels.begin(), labels.end(), r.label) == labels.end()) labels.push_back(r.label);
        const std::pair<double, double> cell{r.trust_mean, r.trust_std};
        if (std::find(cells.begin(), cells.end(), cell) == cells.end()) cells.push_back(cell);
        scores[{r.label, r.trust_mean, r.trust_std}].push_back(r.score);
    }
    const std::size_t pairs = labels.size() * (labels.size() - 1) / 2;
    const double threshold = stats::bonferroni_alpha(alpha, pairs);
    std::vector<PairwiseCount> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
            PairwiseCount pc{labels[i], labels[j]};
            for (const auto& [m, s] : cells) {
                const auto a = scores.find({labels[i], m, s});
                const auto b = scores.find({labels[j], m, s});
                if (a == scores.end() || b == scores.end()) continue;
                ++pc.cells;
                const auto test = stats::mann_whitney_u(a->second, b->second);
                if (test.p_value < threshold) {
                    const double mean_a = stats::summarize(a->second).mean;
                    const double mean_b = stats::summarize(b->second).mean;
                    if (mean_a > mean_b) ++pc.first_better;
                    if (mean_b > mean_a) ++pc.second_better;
                }
            }
            out.push_back(pc);
        }
    }
    return out;
}

void print_significance_matrix(std::ostream& out, const std::vector<PairwiseCount>& matrix, double alpha,
                               std::size_t comparisons_per_cell) {
    out << "Mann-Whitney U, Bonferroni alpha = " << format_double(alpha) << "/" << comparisons_per_cell << " = "
        << format_double(stats::bonferroni_alpha(alpha, comparisons_per_cell)) << '\n';
    out << std::left << std::setw(34) << "pair" << std::right << std::setw(8) << "cells" << std::setw(12)
        << "first>sec" << std::setw(12) << "sec>first" << '\n';
    for (const auto& pc : matrix) {
        out << std::left << std::setw(34) << (pc.first + " vs " + pc.second) << std::right << std::setw(8) << pc.cells
            << std::setw(12) << pc.first_better << std::setw(12) << pc.second_better << '\n';
    }
}

}  // namespace mtirl
