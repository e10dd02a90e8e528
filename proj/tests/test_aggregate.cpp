#include "mtirl/aggregate.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace mtirl;

namespace {

// Direct products, no logs; valid while trusts stay away from 0 and 1.
Posterior brute_bayes(const std::vector<double>& pos, const std::vector<double>& neg) {
    double lp = 0.5;
    double ln = 0.5;
    for (double t : pos) {
        lp *= t;
        ln *= 1.0 - t;
    }
    for (double t : neg) {
        lp *= 1.0 - t;
        ln *= t;
    }
    return {lp / (lp + ln), ln / (lp + ln)};
}

TrustStore store_with(std::initializer_list<std::pair<TrainerId, TrustRecord>> recs) {
    TrustStore s;
    for (const auto& [id, r] : recs) {
        s.ensure(id, r.base_rate());
        if (r.alpha() > 0) s.add_evidence(id, Vote::positive, r.alpha());
        if (r.beta() > 0) s.add_evidence(id, Vote::negative, r.beta());
    }
    return s;
}

}  // namespace

TEST(BayesPosterior, HandValues) {
    auto p = bayes_posterior(std::vector{0.8}, {});
    EXPECT_NEAR(p.pos, 0.8, 1e-12);
    EXPECT_NEAR(p.neg, 0.2, 1e-12);
    p = bayes_posterior(std::vector{0.8}, std::vector{0.6});
    EXPECT_NEAR(p.pos, 0.32 / 0.44, 1e-12);
    EXPECT_NEAR(p.pos, 0.7273, 5e-5);
    EXPECT_NEAR(p.neg, 0.2727, 5e-5);
    p = bayes_posterior({}, {});
    EXPECT_DOUBLE_EQ(p.pos, 0.5);
    EXPECT_DOUBLE_EQ(p.neg, 0.5);
}

TEST(BayesPosterior, MatchesBruteForceOnAllSignPatterns) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> trust(0.01, 0.99);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> t(5);
        for (auto& x : t) x = trust(rng);
        for (unsigned n = 1; n <= 5; ++n) {
            for (unsigned mask = 0; mask < (1U << n); ++mask) {
                std::vector<double> pos, neg;
                for (unsigned i = 0; i < n; ++i) ((mask >> i) & 1U ? pos : neg).push_back(t[i]);
                const auto got = bayes_posterior(pos, neg);
                const auto want = brute_bayes(pos, neg);
                ASSERT_NEAR(got.pos, want.pos, 1e-9);
                ASSERT_NEAR(got.neg, want.neg, 1e-9);
            }
        }
    }
}

TEST(BayesPosterior, ClampsExtremeTrusts) {
    const auto p = bayes_posterior(std::vector{1.0}, std::vector{1.0});
    EXPECT_DOUBLE_EQ(p.pos, 0.5);
    const auto q = bayes_posterior(std::vector{0.0, 0.0}, std::vector{1.0});
    EXPECT_TRUE(std::isfinite(q.pos));
    EXPECT_NEAR(q.pos + q.neg, 1.0, 1e-12);
    EXPECT_LT(q.pos, 1e-9);
}

TEST(BayesPosterior, RejectsOutOfRangeInput) {
    EXPECT_THROW(bayes_posterior(std::vector{1.2}, {}), std::invalid_argument);
    EXPECT_THROW(bayes_posterior({}, {}, 1.0), std::invalid_argument);
}

TEST(WeightedVote, HandValues) {
    auto p = weighted_vote(std::vector{0.8}, std::vector{0.6});
    EXPECT_NEAR(p.pos, 0.8 / 1.4, 1e-15);
    EXPECT_NEAR(p.neg, 0.6 / 1.4, 1e-15);
    p = weighted_vote(std::vector{1.0, 1.0}, std::vector{1.0});
    EXPECT_DOUBLE_EQ(p.pos, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(p.neg, 1.0 / 3.0);
    p = weighted_vote({}, {});
    EXPECT_DOUBLE_EQ(p.pos, 0.5);
    EXPECT_DOUBLE_EQ(p.neg, 0.5);
}

TEST(MajorityVote, HandValues) {
    auto p = majority_vote(3, 1);
    EXPECT_DOUBLE_EQ(p.pos, 0.75);
    EXPECT_DOUBLE_EQ(p.neg, 0.25);
    p = majority_vote(2, 2);
    EXPECT_DOUBLE_EQ(p.pos, 0.5);
    p = majority_vote(0, 5);
    EXPECT_DOUBLE_EQ(p.pos, 0.0);
    EXPECT_DOUBLE_EQ(p.neg, 1.0);
}

TEST(MajorityVote, EqualsUnitWeightedVoteExactly) {
    for (std::size_t n = 0; n < 12; ++n) {
        for (std::size_t m = 0; m < 12; ++m) {
            const auto a = majority_vote(n, m);
            const auto b = weighted_vote(std::vector<double>(n, 1.0), std::vector<double>(m, 1.0));
            ASSERT_EQ(a.pos, b.pos);
            ASSERT_EQ(a.neg, b.neg);
        }
    }
}

TEST(Aggregators, LabelSymmetryAndNormalization) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> trust(0.0, 1.0);
    std::uniform_int_distribution<int> count(0, 7);
    for (int i = 0; i < 5000; ++i) {
        std::vector<double> pos(count(rng)), neg(count(rng));
        for (auto& x : pos) x = trust(rng);
        for (auto& x : neg) x = trust(rng);
        const auto b = bayes_posterior(pos, neg);
        const auto bs = bayes_posterior(neg, pos);
        ASSERT_NEAR(b.pos + b.neg, 1.0, 1e-9);
        ASSERT_NEAR(b.pos, bs.neg, 1e-12);
        const auto w = weighted_vote(pos, neg);
        const auto ws = weighted_vote(neg, pos);
        ASSERT_NEAR(w.pos + w.neg, 1.0, 1e-9);
        ASSERT_EQ(w.pos, ws.neg);
        const auto m = majority_vote(pos.size(), neg.size());
        const auto ms = majority_vote(neg.size(), pos.size());
        ASSERT_EQ(m.pos, ms.neg);
    }
}

TEST(BwveDecide, FreshTrainersReduceToVoting) {
    TrustStore store;
    for (auto id : {"a", "b", "c"}) store.ensure(id);
    FeedbackSet fb;
    fb.add("a", Vote::positive);
    fb.add("b", Vote::positive);
    fb.add("c", Vote::negative);
    const Decision d = bwve_decide(fb, store);
    EXPECT_DOUBLE_EQ(d.avg_uncertainty, 1.0);
    EXPECT_NEAR(d.p_pos, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(d.p_neg, 1.0 / 3.0, 1e-15);
    EXPECT_EQ(d.reward, Reward::positive);
    EXPECT_NEAR(d.confidence, 1.0 / 3.0, 1e-15);
}

TEST(BwveDecide, TwoTrainerHandExample) {
    const TrustStore store = store_with({{"p", TrustRecord(8, 0)}, {"n", TrustRecord(3, 3)}});
    FeedbackSet fb;
    fb.add("p", Vote::positive);
    fb.add("n", Vote::negative);
    const Decision d = bwve_decide(fb, store);
    EXPECT_NEAR(d.avg_uncertainty, 0.225, 1e-15);
    const double bayes = 0.9;  // 0.9·0.5 / (0.9·0.5 + 0.1·0.5)
    const double vote = 0.9 / 1.4;
    EXPECT_NEAR(d.p_pos, 0.775 * bayes + 0.225 * vote, 1e-12);
    EXPECT_NEAR(d.p_pos, 0.8421, 5e-5);
    EXPECT_NEAR(d.p_neg, 0.1579, 5e-5);
    EXPECT_EQ(d.reward, Reward::positive);
    EXPECT_NEAR(d.confidence, 0.6843, 5e-5);
}

TEST(BwveDecide, SymmetricFeedbackIsTie) {
    const TrustStore store = store_with({{"a", TrustRecord(4, 1)}, {"b", TrustRecord(4, 1)}});
    FeedbackSet fb;
    fb.add("a", Vote::positive);
    fb.add("b", Vote::negative);
    const Decision d = bwve_decide(fb, store);
    EXPECT_EQ(d.p_pos, 0.5);
    EXPECT_EQ(d.p_neg, 0.5);
    EXPECT_EQ(d.reward, Reward::tie);
    EXPECT_EQ(d.confidence, 0.0);
}

TEST(BwveDecide, EmptyFeedbackIsTie) {
    const Decision d = bwve_decide(FeedbackSet{}, TrustStore{});
    EXPECT_EQ(d.reward, Reward::tie);
    EXPECT_EQ(d.confidence, 0.0);
}

TEST(BwveDecide, UnknownTrainerThrows) {
    FeedbackSet fb;
    fb.add("ghost", Vote::positive);
    EXPECT_THROW(bwve_decide(fb, TrustStore{}), UnknownTrainer);
}

TEST(BwveBlend, InjectedUncertaintyEndpoints) {
    const Posterior bayes{0.9, 0.1};
    const Posterior vote{0.6, 0.4};
    const Decision all_vote = bwve_blend(bayes, vote, 1.0);
    EXPECT_EQ(all_vote.p_pos, vote.pos);
    EXPECT_EQ(all_vote.p_neg, vote.neg);
    const Decision all_bayes = bwve_blend(bayes, vote, 0.0);
    EXPECT_EQ(all_bayes.p_pos, bayes.pos);
    EXPECT_EQ(all_bayes.p_neg, bayes.neg);
}

TEST(BwveDecide, AverageUncertaintyCountsDistinctTrainers) {
    const TrustStore store = store_with({{"a", TrustRecord(8, 0)}, {"b", TrustRecord(0, 0)}});
    FeedbackSet fb;
    fb.add("a", Vote::positive);
    fb.add("a", Vote::positive);
    fb.add("a", Vote::negative);
    fb.add("b", Vote::negative);
    EXPECT_NEAR(average_uncertainty(fb, store), (0.2 + 1.0) / 2.0, 1e-15);
}

TEST(BwveDecide, RewardInvariantUnderPermutation) {
    std::mt19937_64 rng(5);
    TrustStore store;
    std::uniform_real_distribution<double> ev(0.0, 10.0);
    for (int i = 0; i < 8; ++i) {
        const TrainerId id = "t" + std::to_string(i);
        store.ensure(id);
        store.add_evidence(id, Vote::positive, ev(rng));
        store.add_evidence(id, Vote::negative, ev(rng));
    }
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<int> pick(0, 7);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<FeedbackEvent> events;
        for (int k = 0; k < 6; ++k) events.push_back({"t" + std::to_string(pick(rng)), coin(rng) ? Vote::positive : Vote::negative});
        const Decision base = bwve_decide(FeedbackSet(events), store);
        for (int s = 0; s < 5; ++s) {
            std::shuffle(events.begin(), events.end(), rng);
            const Decision d = bwve_decide(FeedbackSet(events), store);
            ASSERT_EQ(d.reward, base.reward);
            ASSERT_EQ(d.p_pos, base.p_pos);
        }
    }
}

TEST(ApplyEvidence, HandExamples) {
    TrustStore store;
    store.ensure("A");
    store.ensure("B");
    FeedbackSet fb;
    fb.add("A", Vote::positive);
    fb.add("B", Vote::negative);
    Decision d = make_decision({0.7, 0.3}, 1.0);
    d.confidence = 0.4;
    apply_evidence_updates(d, fb, store);
    EXPECT_DOUBLE_EQ(store.at("A").alpha(), 0.4);
    EXPECT_DOUBLE_EQ(store.at("B").beta(), 0.4);

    const TrustStore before = store;
    apply_evidence_updates(make_decision({0.5, 0.5}, 1.0), fb, store);
    EXPECT_EQ(store, before);

    FeedbackSet only_a;
    only_a.add("A", Vote::positive);
    Decision neg = make_decision({0.375, 0.625}, 1.0);
    ASSERT_EQ(neg.reward, Reward::negative);
    ASSERT_DOUBLE_EQ(neg.confidence, 0.25);
    apply_evidence_updates(neg, only_a, store);
    EXPECT_DOUBLE_EQ(store.at("A").beta(), 0.25);
    EXPECT_DOUBLE_EQ(store.at("A").alpha(), 0.4);
}

TEST(ApplyEvidence, OneUpdatePerEvent) {
    TrustStore store;
    store.ensure("A");
    FeedbackSet fb;
    fb.add("A", Vote::positive);
    fb.add("A", Vote::positive);
    apply_evidence_updates(make_decision({1.0, 0.0}, 1.0), fb, store);
    EXPECT_DOUBLE_EQ(store.at("A").alpha(), 2.0);
}

TEST(ApplyEvidence, UnknownTrainerLeavesStoreUntouched) {
    TrustStore store;
    store.ensure("A");
    FeedbackSet fb;
    fb.add("A", Vote::positive);
    fb.add("ghost", Vote::positive);
    EXPECT_THROW(apply_evidence_updates(make_decision({1.0, 0.0}, 1.0), fb, store), UnknownTrainer);
    EXPECT_DOUBLE_EQ(store.at("A").alpha(), 0.0);
}

TEST(Decide, MethodsDispatch) {
    const TrustStore store = store_with({{"p", TrustRecord(8, 0)}, {"n", TrustRecord(3, 3)}});
    FeedbackSet fb;
    fb.add("p", Vote::positive);
    fb.add("n", Vote::negative);
    EXPECT_NEAR(decide(Method::bayes, fb, store).p_pos, 0.9, 1e-12);
    EXPECT_NEAR(decide(Method::weighted_vote, fb, store).p_pos, 0.9 / 1.4, 1e-12);
    EXPECT_DOUBLE_EQ(decide(Method::majority, fb, store).p_pos, 0.5);
    EXPECT_EQ(decide(Method::bwve, fb, store).p_pos, bwve_decide(fb, store).p_pos);
    EXPECT_EQ(parse_method("bwve"), Method::bwve);
    EXPECT_EQ(parse_method("weighted_vote"), Method::weighted_vote);
    EXPECT_FALSE(parse_method("median").has_value());
}
