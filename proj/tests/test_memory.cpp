#include "mtirl/memory.hpp"

#include <gtest/gtest.h>

using namespace mtirl;

namespace {

const StateAction kKey{{2, 3}, Action::right};

FeedbackSet one(const TrainerId& id, Vote v) {
    FeedbackSet s;
    s.add(id, v);
    return s;
}

QueryFn returning(FeedbackSet set, int* calls = nullptr) {
    return [set = std::move(set), calls](const StateAction&) {
        if (calls) ++*calls;
        return set;
    };
}

}  // namespace

TEST(ReviewProbability, Endpoints) {
    TrustStore store;
    store.ensure("a");
    store.ensure("b");
    store.add_evidence("a", Vote::positive, 8);
    store.add_evidence("b", Vote::positive, 3);
    store.add_evidence("b", Vote::negative, 3);

    // One fresh trainer alone: vote fraction is 1, confidence 1.
    TrustStore fresh;
    fresh.ensure("x");
    EXPECT_DOUBLE_EQ(review_probability(one("x", Vote::positive), fresh), 0.0);

    FeedbackSet tie;
    tie.add("b", Vote::positive);
    tie.add("b", Vote::negative);
    EXPECT_DOUBLE_EQ(review_probability(tie, store), 1.0);
    EXPECT_DOUBLE_EQ(review_probability(FeedbackSet{}, store), 1.0);

    FeedbackSet pair;
    pair.add("a", Vote::positive);
    pair.add("b", Vote::negative);
    EXPECT_NEAR(review_probability(pair, store), 0.3157, 5e-5);
}

TEST(Resolve, UnseenPairQueriesAndArchives) {
    FeedbackArchive archive;
    TrustStore store;
    store.ensure("a");
    Rng rng(1);
    int calls = 0;
    const Resolution r = resolve(kKey, archive, store, returning(one("a", Vote::positive), &calls), rng);
    EXPECT_TRUE(r.queried);
    EXPECT_EQ(calls, 1);
    ASSERT_TRUE(archive.contains(kKey));
    EXPECT_EQ(archive.find(kKey)->feedback, one("a", Vote::positive));
    EXPECT_EQ(r.decision.reward, Reward::positive);
    EXPECT_DOUBLE_EQ(store.at("a").alpha(), 1.0);
}

TEST(Resolve, ConfidentArchiveIsNotRequeried) {
    FeedbackArchive archive;
    TrustStore store;
    FeedbackSet panel;
    for (auto id : {"a", "b", "c", "d", "e"}) {
        store.ensure(id);
        store.add_evidence(id, Vote::positive, 1000.0);
        panel.add(id, Vote::positive);
    }
    Rng rng(2);
    resolve(kKey, archive, store, returning(panel), rng);
    ASSERT_LT(review_probability(archive.find(kKey)->feedback, store), 1e-9);
    const TrustStore before = store;
    int calls = 0;
    for (int i = 0; i < 200; ++i) {
        const Resolution r = resolve(kKey, archive, store, returning(one("a", Vote::negative), &calls), rng);
        ASSERT_FALSE(r.queried);
        ASSERT_EQ(r.decision.p_pos, bwve_decide(archive.find(kKey)->feedback, store).p_pos);
    }
    EXPECT_EQ(calls, 0);
    EXPECT_EQ(store, before);
}

TEST(Resolve, ForcedReviewMergesArchiveAndFresh) {
    FeedbackArchive archive;
    TrustStore store;
    store.ensure("A");
    store.ensure("B");
    store.ensure("C");
    // A tie archive has review probability 1.
    FeedbackSet tie;
    tie.add("A", Vote::positive);
    tie.add("C", Vote::negative);
    archive.record_first(kKey, tie, bwve_decide(tie, store));
    ASSERT_DOUBLE_EQ(review_probability(tie, store), 1.0);

    Rng rng(3);
    const TrustStore snapshot = store;
    const Resolution r = resolve(kKey, archive, store, returning(one("B", Vote::negative)), rng);
    EXPECT_TRUE(r.queried);
    FeedbackSet merged = tie;
    merged.add("B", Vote::negative);
    EXPECT_EQ(archive.find(kKey)->feedback, merged);
    const Decision want = bwve_decide(merged, snapshot);
    EXPECT_EQ(r.decision.p_pos, want.p_pos);
    EXPECT_EQ(r.decision.reward, Reward::negative);
    // Only the fresh responder pays evidence.
    EXPECT_EQ(store.at("A"), snapshot.at("A"));
    EXPECT_EQ(store.at("C"), snapshot.at("C"));
    EXPECT_DOUBLE_EQ(store.at("B").alpha(), want.confidence);
}

TEST(Resolve, ReviewRateMatchesProbability) {
    TrustStore store;
    store.ensure("a");
    store.ensure("b");
    store.add_evidence("a", Vote::positive, 8);
    store.add_evidence("b", Vote::positive, 3);
    store.add_evidence("b", Vote::negative, 3);
    FeedbackSet pair;
    pair.add("a", Vote::positive);
    pair.add("b", Vote::negative);
    const double p = review_probability(pair, store);
    Rng rng(4);
    int queried = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        FeedbackArchive archive;
        archive.record_first(kKey, pair, bwve_decide(pair, store));
        TrustStore scratch = store;
        queried += resolve(kKey, archive, scratch, returning(FeedbackSet{}), rng).queried ? 1 : 0;
    }
    const double sd = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(static_cast<double>(queried) / n, p, 4 * sd);
}

TEST(Resolve, NoReviewReturnsFirstDecision) {
    FeedbackArchive archive;
    TrustStore store;
    store.ensure("a");
    store.ensure("b");
    Rng rng(5);
    FeedbackSet first;
    first.add("a", Vote::positive);
    first.add("b", Vote::negative);
    const Resolution r0 = resolve(kKey, archive, store, returning(first), rng, {false});
    ASSERT_EQ(r0.decision.reward, Reward::tie);
    const TrustStore before = store;
    int calls = 0;
    for (int i = 0; i < 20; ++i) {
        const Resolution r = resolve(kKey, archive, store, returning(one("a", Vote::positive), &calls), rng, {false});
        ASSERT_FALSE(r.queried);
        ASSERT_EQ(r.decision.p_pos, r0.decision.p_pos);
    }
    EXPECT_EQ(calls, 0);
    EXPECT_EQ(store, before);
}

TEST(Resolve, ZeroResponseFirstQueryIsTie) {
    FeedbackArchive archive;
    TrustStore store;
    Rng rng(6);
    const Resolution r = resolve(kKey, archive, store, returning(FeedbackSet{}), rng);
    EXPECT_TRUE(r.queried);
    EXPECT_EQ(r.decision.reward, Reward::tie);
    EXPECT_TRUE(archive.contains(kKey));
}

TEST(FeedbackArchive, EntriesOnlyGrow) {
    FeedbackArchive archive;
    TrustStore store;
    store.ensure("a");
    archive.record_first(kKey, one("a", Vote::positive), bwve_decide(one("a", Vote::positive), store));
    archive.append(kKey, one("a", Vote::negative));
    archive.append(kKey, FeedbackSet{});
    EXPECT_EQ(archive.find(kKey)->feedback.size(), 2U);
    EXPECT_EQ(archive.find(kKey)->first_decision.reward, Reward::positive);
    EXPECT_EQ(archive.find({{0, 0}, Action::up}), nullptr);
}

TEST(FeedbackArchive, JsonRoundTrip) {
    FeedbackArchive archive;
    TrustStore store;
    store.ensure("t0");
    store.ensure("t1");
    FeedbackSet fb;
    fb.add("t0", Vote::positive);
    fb.add("t1", Vote::negative);
    archive.record_first(kKey, fb, bwve_decide(fb, store));
    archive.record_first({{0, 1}, Action::up}, one("t1", Vote::positive), bwve_decide(one("t1", Vote::positive), store));
    const std::string text = archive.to_json();
    EXPECT_NE(text.find("\"entries\""), std::string::npos);
    const FeedbackArchive back = FeedbackArchive::from_json(text, store);
    ASSERT_EQ(back.size(), 2U);
    EXPECT_EQ(back.find(kKey)->feedback, fb);
    EXPECT_EQ(back.to_json(), text);
    EXPECT_ANY_THROW(FeedbackArchive::from_json("{\"entries\":[{\"state\":[0],\"action\":\"up\",\"feedback\":[]}]}", store));
}
