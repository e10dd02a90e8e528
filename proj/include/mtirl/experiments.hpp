#pragma once

#include "mtirl/aggregate.hpp"
#include "mtirl/gridworld.hpp"
#include "mtirl/parallel.hpp"
#include "mtirl/qtable.hpp"
#include "mtirl/sarsa.hpp"
#include "mtirl/sim_trainers.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mtirl {

inline constexpr double kSimulatedBaseRate = 0.6;

/// Means 0.51, 0.52, ..., 1.00 computed as k/100 so every value is exact in
/// decimal output.
std::vector<double> trust_mean_grid(int first_percent, int last_percent, int step_percent);

struct AggExpConfig {
    std::size_t n_questions = 1000;
    std::size_t n_trainers = 50;
    double response_prob = 0.1;
    std::vector<double> trust_means = trust_mean_grid(51, 100, 1);
    std::vector<double> trust_stds{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    std::size_t repeats = 100;
    std::vector<Method> methods{Method::bwve, Method::bayes, Method::weighted_vote, Method::majority};
    /// Prior trust of every simulated trainer. Above 0.5 so the pure Bayesian
    /// baseline is not stuck on ties before any evidence exists.
    double base_rate = kSimulatedBaseRate;
    std::uint64_t seed = 20220101;

    static AggExpConfig full() { return {}; }
    static AggExpConfig desk();
    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class Variant : std::uint8_t { review, no_review, unlimited, single_trainer };

std::string_view to_string(Variant v) noexcept;
std::optional<Variant> parse_variant(std::string_view text) noexcept;

struct GridExpConfig {
    int max_episodes = 500;
    std::size_t n_trainers = 5;
    double trust_std = 0.2;
    double response_prob = 1.0;
    std::size_t repeats = 100;
    std::vector<Variant> variants{Variant::review, Variant::no_review, Variant::unlimited, Variant::single_trainer};
    std::vector<double> trust_means = trust_mean_grid(51, 100, 1);
    double base_rate = kSimulatedBaseRate;
    /// Greedy best-solution check cadence, in episodes.
    int check_every = 5;
    std::uint64_t seed = 20220102;
    /// Empty selects the bundled default map.
    std::string map_path;
    LearnerConfig learner;

    static GridExpConfig full() { return {}; }
    static GridExpConfig desk();
    void validate() const;
};

/// One experiment run. `score` is accuracy (aggregation) or closeness (grid).
struct RunResult {
    std::string label;
    double trust_mean = 0.0;
    double trust_std = 0.0;
    std::size_t repeat = 0;
    double score = 0.0;
    bool best_solution = false;
    std::size_t n_queries = 0;
    std::size_t n_steps = 0;
    std::uint64_t seed = 0;

    // aggregation only
    std::size_t answered = 0;
    std::size_t answered_correct = 0;
    // gridworld only
    std::size_t episodes = 0;
    std::size_t goal_episodes = 0;
    std::size_t cliff_episodes = 0;
    std::size_t truncated_episodes = 0;

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Aggregation accuracy experiment. Each (mean, std, repeat) world draws one
/// population, one answer key and one response pattern shared by every
/// method, so methods are compared on identical feedback.
std::vector<RunResult> run_aggregation_experiment(const AggExpConfig& config,
                                                  Execution exec = Execution::parallel, int jobs = 0);

/// The trainer population of one aggregation world (same draws as the run).
std::vector<TrainerProfile> aggregation_population(const AggExpConfig& config, double mean, double std_dev,
                                                          std::size_t repeat);

/// Single aggregation run (exposed for tests).
RunResult run_aggregation_cell(const AggExpConfig& config, Method method, double mean, double std_dev,
                               std::size_t repeat);

/// Mean over start-pool cells of shortest/greedy path length; a cell whose
/// greedy path does not reach the goal within `max_actions` scores 0.
double closeness(const QTable& learned, const GridMap& map, int max_actions);

/// Every start-pool cell reaches the goal along a shortest path.
bool is_best_solution(const QTable& learned, const GridMap& map, int max_actions);

/// Grid-world MTIRL experiment over variants × means × repeats.
std::vector<RunResult> run_gridworld_experiment(const GridExpConfig& config, const GridMap& map,
                                                Execution exec = Execution::parallel, int jobs = 0);

/// Single grid-world run (exposed for tests). `optimal` must be optimal_q(map).
RunResult run_gridworld_cell(const GridExpConfig& config, const GridMap& map, const QTable& optimal,
                             Variant variant, double mean, std::size_t repeat);

/// Identifies the config and seed in every output file.
struct OutputHeader {
    std::string experiment;
    std::string config_hash;
    std::uint64_t seed = 0;
};

void write_results_csv(std::ostream& out, const OutputHeader& header, const std::vector<RunResult>& rows,
                       bool gridworld);
void write_summary_csv(std::ostream& out, const OutputHeader& header, const std::vector<RunResult>& rows,
                       bool gridworld);
void write_episode_summary_csv(std::ostream& out, const OutputHeader& header, const std::vector<RunResult>& rows);

/// Pairwise Mann–Whitney comparison of labels within each (mean, std) cell.
struct PairwiseCount {
    std::string first;
    std::string second;
    std::size_t cells = 0;
    std::size_t first_better = 0;   // significant, first has the higher mean score
    std::size_t second_better = 0;  // significant, second has the higher mean score
};

/// Bonferroni threshold alpha / (#pairs per cell).
std::vector<PairwiseCount> significance_matrix(const std::vector<RunResult>& rows, double alpha = 0.05);
void print_significance_matrix(std::ostream& out, const std::vector<PairwiseCount>& matrix, double alpha,
                               std::size_t comparisons_per_cell);

/// Deterministic decimal rendering used in every CSV.
std::string format_double(double v);

}  // namespace mtirl
