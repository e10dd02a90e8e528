#include "mtirl/experiments.hpp"
#include "mtirl/memory.hpp"
#include "mtirl/oracle.hpp"

#include <gtest/gtest.h>

#include <map>
#include <sstream>

using namespace mtirl;

namespace {

AggExpConfig small_agg() {
    AggExpConfig c;
    c.n_questions = 200;
    c.n_trainers = 20;
    c.response_prob = 0.2;
    c.trust_means = {0.6, 0.8};
    c.trust_stds = {0.0, 0.2};
    c.repeats = 3;
    c.seed = 77;
    return c;
}

GridExpConfig small_grid() {
    GridExpConfig c;
    c.max_episodes = 60;
    c.repeats = 3;
    c.trust_means = {0.7, 0.9};
    c.seed = 78;
    return c;
}

GridMap small_map() { return GridMap(5, 4, {4, 3}, {{1, 3}, {2, 3}, {3, 3}}); }

std::string results_csv(const std::vector<RunResult>& rows, bool grid) {
    std::ostringstream out;
    write_results_csv(out, {"test", "0000000000000000", 1}, rows, grid);
    return out.str();
}

}  // namespace

TEST(AggregationExperiment, SerialEqualsParallelAndReruns) {
    const auto cfg = small_agg();
    const auto serial = run_aggregation_experiment(cfg, Execution::serial);
    const auto parallel = run_aggregation_experiment(cfg, Execution::parallel, 4);
    const auto again = run_aggregation_experiment(cfg, Execution::parallel, 3);
    EXPECT_EQ(serial, parallel);
    EXPECT_EQ(results_csv(serial, false), results_csv(again, false));
    EXPECT_EQ(serial.size(), 4U * 2U * 2U * 3U);
}

TEST(AggregationExperiment, PerfectTrainersAnswerCorrectly) {
    auto cfg = small_agg();
    cfg.trust_means = {1.0};
    cfg.trust_stds = {0.0};
    cfg.response_prob = 0.1;
    cfg.n_trainers = 50;
    cfg.repeats = 5;
    for (const auto& r : run_aggregation_experiment(cfg)) {
        ASSERT_GT(r.answered, 0U);
        EXPECT_EQ(r.answered_correct, r.answered) << r.label;
        EXPECT_GE(r.score, 0.99) << r.label;
    }
}

TEST(AggregationExperiment, PopulationsSharedAcrossMethods) {
    const auto cfg = small_agg();
    const auto a = aggregation_population(cfg, 0.6, 0.2, 1);
    const auto b = aggregation_population(cfg, 0.6, 0.2, 1);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].true_trust, b[i].true_trust);
    const auto c = aggregation_population(cfg, 0.6, 0.2, 2);
    EXPECT_NE(a[0].true_trust, c[0].true_trust);
}

TEST(AggregationExperiment, MajorityLeavesNoTrustTrace) {
    auto cfg = small_agg();
    cfg.methods = {Method::majority};
    cfg.trust_means = {0.8};
    cfg.trust_stds = {0.0};
    const auto rows = run_aggregation_experiment(cfg);
    for (const auto& r : rows) EXPECT_EQ(r.label, "majority");
}

TEST(AggregationExperiment, AccuracyRisesWithMeanAtZeroStd) {
    AggExpConfig cfg;
    cfg.trust_means = trust_mean_grid(55, 100, 5);
    cfg.trust_stds = {0.0};
    cfg.repeats = 100;
    const auto rows = run_aggregation_experiment(cfg);
    std::map<std::pair<std::string, double>, double> mean_acc;
    for (const auto& r : rows) mean_acc[{r.label, r.trust_mean}] += r.score / 100.0;
    for (Method m : cfg.methods) {
        const std::string label(to_string(m));
        for (std::size_t i = 1; i < cfg.trust_means.size(); ++i) {
            const double prev = mean_acc[{label, cfg.trust_means[i - 1]}];
            const double cur = mean_acc[{label, cfg.trust_means[i]}];
            EXPECT_GE(cur, prev - 0.02) << label << " at " << cfg.trust_means[i];
        }
    }
}

TEST(AggregationExperiment, ValidationNamesField) {
    auto cfg = small_agg();
    cfg.trust_means = {1.2};
    try {
        cfg.validate();
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("trust_means"), std::string::npos) << e.what();
    }
}

TEST(Closeness, OptimalIsOne) {
    const GridMap map = GridMap::default_map();
    const QTable q = optimal_q(map);
    EXPECT_DOUBLE_EQ(closeness(q, map, 200), 1.0);
    EXPECT_TRUE(is_best_solution(q, map, 200));
}

TEST(Closeness, NeverReachingGoalIsZero) {
    const GridMap map = GridMap::default_map();
    QTable q(map);
    for (std::size_t i = 0; i < map.num_cells(); ++i) q(map.state_at(i), Action::up) = 1.0;
    EXPECT_DOUBLE_EQ(closeness(q, map, 200), 0.0);
    EXPECT_FALSE(is_best_solution(q, map, 200));
}

TEST(Closeness, CorridorHandRatios) {
    // Two-row corridor, goal at the top right. Bottom cells detour:
    // (0,1) up, top row right. Pool: (0,0) (1,0) (0,1) (1,1) (2,1).
    const GridMap map(3, 2, {2, 0}, {});
    QTable q(map);
    q({0, 0}, Action::right) = 1;
    q({1, 0}, Action::right) = 1;
    q({0, 1}, Action::up) = 1;
    q({1, 1}, Action::left) = 1;  // 1 + len(0,1) = 4, shortest 2
    q({2, 1}, Action::left) = 1;  // 1 + 4 = 5, shortest 1
    // Ratios: 2/2, 1/1, 3/3, 2/4, 1/5.
    EXPECT_NEAR(closeness(q, map, 100), (1 + 1 + 1 + 0.5 + 0.2) / 5.0, 1e-15);
}

TEST(Closeness, HalfFromOneLoopingCell) {
    const GridMap map(3, 1, {2, 0}, {});
    QTable q(map);
    q({1, 0}, Action::right) = 1;
    q({0, 0}, Action::left) = 1;
    EXPECT_DOUBLE_EQ(closeness(q, map, 100), 0.5);
}

TEST(GridworldExperiment, SerialEqualsParallelAndReruns) {
    const auto cfg = small_grid();
    const GridMap map = small_map();
    const auto serial = run_gridworld_experiment(cfg, map, Execution::serial);
    const auto parallel = run_gridworld_experiment(cfg, map, Execution::parallel, 4);
    EXPECT_EQ(serial, parallel);
    EXPECT_EQ(results_csv(serial, true), results_csv(run_gridworld_experiment(cfg, map), true));
}

TEST(GridworldExperiment, UnlimitedQueriesEveryStep) {
    auto cfg = small_grid();
    cfg.variants = {Variant::unlimited, Variant::single_trainer};
    for (const auto& r : run_gridworld_experiment(cfg, small_map())) {
        EXPECT_EQ(r.n_queries, r.n_steps) << r.label;
    }
}

TEST(GridworldExperiment, TruthfulTrainerSolvesSmallMap) {
    auto cfg = small_grid();
    cfg.variants = {Variant::single_trainer};
    cfg.trust_means = {1.0};
    cfg.max_episodes = 300;
    cfg.repeats = 10;
    for (const auto& r : run_gridworld_experiment(cfg, small_map())) {
        EXPECT_TRUE(r.best_solution);
        EXPECT_DOUBLE_EQ(r.score, 1.0);
    }
}

TEST(GridworldExperiment, QueryOrderingOnSharedTrajectory) {
    // Feed one visit sequence to the three query policies.
    const GridMap map = small_map();
    TrustStore s_review, s_none;
    for (auto* s : {&s_review, &s_none}) {
        s->ensure("a");
        s->ensure("b");
    }
    Rng pick(9), coin(10), r1(11), r2(11);
    const auto query = [&](const StateAction&) {
        FeedbackSet f;
        f.add("a", coin() % 2 ? Vote::positive : Vote::negative);
        f.add("b", coin() % 2 ? Vote::positive : Vote::negative);
        return f;
    };
    FeedbackArchive a_review, a_none;
    std::size_t q_review = 0, q_none = 0, q_unlimited = 0;
    for (int t = 0; t < 3000; ++t) {
        const AgentState s = map.start_pool()[pick() % map.start_pool().size()];
        const StateAction key{s, kActions[pick() % 4]};
        q_review += resolve(key, a_review, s_review, query, r1).queried ? 1 : 0;
        q_none += resolve(key, a_none, s_none, query, r2, {false}).queried ? 1 : 0;
        ++q_unlimited;
    }
    EXPECT_LE(q_none, q_review);
    EXPECT_LE(q_review, q_unlimited);
    EXPECT_EQ(q_none, a_none.size());
}

TEST(GridworldExperiment, ValidationNamesField) {
    auto cfg = small_grid();
    cfg.check_every = 0;
    try {
        cfg.validate();
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("check_every"), std::string::npos) << e.what();
    }
}

TEST(Significance, CountsPairs) {
    std::vector<RunResult> rows;
    for (std::size_t r = 0; r < 8; ++r) {
        rows.push_back({"hi", 0.7, 0.2, r, 0.9 + 0.001 * r});
        rows.push_back({"lo", 0.7, 0.2, r, 0.5 + 0.001 * r});
        rows.push_back({"same", 0.7, 0.2, r, 0.5 + 0.001 * r});
    }
    const auto m = significance_matrix(rows);
    ASSERT_EQ(m.size(), 3U);
    for (const auto& p : m) {
        EXPECT_EQ(p.cells, 1U);
        if (p.first == "hi" || p.second == "hi") {
            EXPECT_EQ(p.first == "hi" ? p.first_better : p.second_better, 1U);
        } else {
            EXPECT_EQ(p.first_better + p.second_better, 0U);
        }
    }
}

TEST(Outputs, HeaderAndShortestDecimals) {
    RunResult r{"bwve", 0.55, 0.2, 0, 0.1 + 0.2};
    const std::string csv = results_csv({r}, false);
    EXPECT_EQ(csv.rfind("# experiment=test config_hash=0000000000000000 seed=1\n", 0), 0U);
    EXPECT_NE(csv.find("0.30000000000000004"), std::string::npos);
    EXPECT_EQ(format_double(0.55), "0.55");
}
