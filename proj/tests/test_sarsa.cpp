#include "mtirl/experiments.hpp"
#include "mtirl/oracle.hpp"
#include "mtirl/sarsa.hpp"
#include "mtirl/sim_trainers.hpp"

#include <gtest/gtest.h>

using namespace mtirl;

namespace {

RewardSource truthful(const QTable& optimal) {
    return [&optimal](const StateAction& k) {
        return RewardSignal{is_best_action(optimal, k.state, k.action) ? Reward::positive : Reward::negative, true};
    };
}

double chi2_uniform(const std::array<int, 4>& counts, int n) {
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - n / 4.0) * (c - n / 4.0) / (n / 4.0);
    return chi2;
}

}  // namespace

TEST(SelectAction, GreedyUniqueArgmax) {
    QTable q(2, 2);
    q({1, 1}, Action::left) = 0.3;
    Rng rng(1);
    for (int i = 0; i < 200; ++i) ASSERT_EQ(select_action(q, {1, 1}, 0.0, rng), Action::left);
}

TEST(SelectAction, EpsilonOneIsUniform) {
    QTable q(2, 2);
    q({0, 0}, Action::up) = 5.0;
    Rng rng(2);
    std::array<int, 4> counts{};
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++counts[index_of(select_action(q, {0, 0}, 1.0, rng))];
    // df = 3, 3σ above the mean.
    EXPECT_LT(chi2_uniform(counts, n), 3 + 3 * std::sqrt(6.0));
}

TEST(SelectAction, AllZeroTiesAreUniform) {
    QTable q(2, 2);
    Rng rng(3);
    std::array<int, 4> counts{};
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++counts[index_of(select_action(q, {1, 0}, 0.0, rng))];
    EXPECT_LT(chi2_uniform(counts, n), 3 + 3 * std::sqrt(6.0));
}

TEST(SarsaUpdate, HandValues) {
    LearnerConfig cfg;
    cfg.learning_rate = 0.5;
    QTable q(2, 2);
    sarsa_update(q, {0, 0}, Action::up, 1.0, StateAction{{1, 0}, Action::down}, cfg);
    EXPECT_DOUBLE_EQ(q({0, 0}, Action::up), 0.5);

    QTable z(2, 2);
    sarsa_update(z, {0, 0}, Action::up, 0.0, StateAction{{1, 0}, Action::down}, cfg);
    EXPECT_EQ(z, QTable(2, 2));

    LearnerConfig c2;
    c2.learning_rate = 0.1;
    c2.gamma = 0.9;
    QTable t(2, 2);
    t({0, 0}, Action::right) = 1.0;
    t({1, 0}, Action::up) = 50.0;
    sarsa_update(t, {0, 0}, Action::right, 0.0, std::nullopt, c2);
    EXPECT_DOUBLE_EQ(t({0, 0}, Action::right), 0.9);
}

TEST(SarsaUpdate, ConvergesToFixedPoint) {
    LearnerConfig cfg;
    cfg.learning_rate = 0.2;
    cfg.gamma = 0.9;
    QTable q(2, 1);
    q({1, 0}, Action::left) = 3.0;
    for (int i = 0; i < 500; ++i) sarsa_update(q, {0, 0}, Action::right, 1.0, StateAction{{1, 0}, Action::left}, cfg);
    EXPECT_NEAR(q({0, 0}, Action::right), 1.0 + 0.9 * 3.0, 1e-12);
}

TEST(LearnerConfig, EpsilonScheduleAndValidation) {
    LearnerConfig cfg;
    EXPECT_DOUBLE_EQ(cfg.epsilon_at(0), 0.1);
    EXPECT_NEAR(cfg.epsilon_at(150), 0.055, 1e-15);
    EXPECT_DOUBLE_EQ(cfg.epsilon_at(300), 0.01);
    EXPECT_DOUBLE_EQ(cfg.epsilon_at(1000), 0.01);
    EXPECT_DOUBLE_EQ(cfg.reward_value(Reward::tie), 0.0);
    cfg.gamma = 1.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(RunEpisode, MaxActionsOneTruncates) {
    const GridMap map = GridMap::default_map();
    const QTable optimal = optimal_q(map);
    LearnerConfig cfg;
    cfg.max_actions = 1;
    QTable q(map);
    Rng rng(4);
    const EpisodeLog log = run_episode(map, q, cfg, truthful(optimal), {0, 0}, 0.1, rng);
    EXPECT_EQ(log.steps.size(), 1U);
    EXPECT_EQ(log.outcome, Outcome::ongoing);
}

TEST(RunEpisode, DeterministicForSeed) {
    const GridMap map = GridMap::default_map();
    const QTable optimal = optimal_q(map);
    LearnerConfig cfg;
    auto run = [&] {
        QTable q(map);
        Rng rng(99);
        std::vector<EpisodeStep> all;
        for (int e = 0; e < 20; ++e) {
            const auto log = run_episode(map, q, cfg, truthful(optimal), cfg.epsilon_at(e), rng);
            all.insert(all.end(), log.steps.begin(), log.steps.end());
        }
        return std::pair{all, q};
    };
    const auto a = run();
    const auto b = run();
    EXPECT_EQ(a.second, b.second);
    EXPECT_EQ(a.first, b.first);
}

TEST(RunEpisode, ConvergedTruthfulLearnerFollowsShortestPaths) {
    const GridMap map = GridMap::default_map();
    const QTable optimal = optimal_q(map);
    LearnerConfig cfg;
    QTable q(map);
    Rng rng(2024);
    // Train from every start cell in turn so coverage is complete.
    for (int round = 0; round < 20; ++round) {
        for (const auto& s : map.start_pool()) run_episode(map, q, cfg, truthful(optimal), s, 0.1, rng);
    }
    ASSERT_TRUE(is_best_solution(q, map, cfg.max_actions));
    for (const auto& s : map.start_pool()) {
        const EpisodeLog log = run_episode(map, q, cfg, truthful(optimal), s, 0.0, rng);
        ASSERT_EQ(log.outcome, Outcome::goal);
        ASSERT_EQ(static_cast<int>(log.steps.size()), map.shortest_path_length(s));
    }
}

TEST(RunEpisode, TerminalStepsBootstrapZero) {
    const GridMap map(2, 1, {1, 0}, {});
    LearnerConfig cfg;
    cfg.learning_rate = 1.0;
    QTable q(map);
    q({1, 0}, Action::up) = 100.0;  // terminal cell, must be ignored
    Rng rng(5);
    const RewardSource always_pos = [](const StateAction&) { return RewardSignal{Reward::positive, true}; };
    // Force the move to the goal: only right has a non-negative value.
    q({0, 0}, Action::up) = q({0, 0}, Action::down) = q({0, 0}, Action::left) = -5.0;
    const EpisodeLog log = run_episode(map, q, cfg, always_pos, {0, 0}, 0.0, rng);
    ASSERT_EQ(log.outcome, Outcome::goal);
    EXPECT_DOUBLE_EQ(q({0, 0}, Action::right), 1.0);
}
