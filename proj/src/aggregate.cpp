#include "mtirl/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mtirl {

namespace {

void check_trusts(std::span<const double> trusts, const char* who) {
    for (double t : trusts) {
        if (!(t >= 0.0 && t <= 1.0)) {
            throw std::invalid_argument(std::string(who) + ": trust values must lie in [0, 1]");
        }
    }
}

double clamp_trust(double t) noexcept {
    return std::clamp(t, kTrustFloor, 1.0 - kTrustFloor);
}

// Sums in ascending order so the result does not depend on event order.
double ordered_sum(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return std::accumulate(sorted.begin(), sorted.end(), 0.0);
}

struct SplitTrusts {
    std::vector<double> pos;
    std::vector<double> neg;
};

SplitTrusts split_trusts(const FeedbackSet& feedback, const TrustStore& store) {
    SplitTrusts out;
    for (const auto& e : feedback.events()) {
        (e.value == Vote::positive ? out.pos : out.neg).push_back(store.trust(e.trainer));
    }
    std::sort(out.pos.begin(), out.pos.end());
    std::sort(out.neg.begin(), out.neg.end());
    return out;
}

}  // namespace

std::string_view to_string(Reward r) noexcept {
    switch (r) {
        case Reward::positive: return "positive";
        case Reward::negative: return "negative";
        case Reward::tie: return "tie";
    }
    return "tie";
}

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::bwve: return "bwve";
        case Method::bayes: return "bayes";
        case Method::weighted_vote: return "weighted_vote";
        case Method::majority: return "majority";
    }
    return "bwve";
}

std::optional<Method> parse_method(std::string_view text) noexcept {
    for (Method m : {Method::bwve, Method::bayes, Method::weighted_vote, Method::majority}) {
        if (text == to_string(m)) {
            return m;
        }
    }
    return std::nullopt;
}

Posterior bayes_posterior(std::span<const double> pos_trusts, std::span<const double> neg_trusts,
                          double prior_pos) {
    check_trusts(pos_trusts, "bayes_posterior");
    check_trusts(neg_trusts, "bayes_posterior");
    if (!(prior_pos > 0.0 && prior_pos < 1.0)) {
        throw std::invalid_argument("bayes_posterior: prior_pos must lie in (0, 1)");
    }
    std::vector<double> log_pos_terms;
    std::vector<double> log_neg_terms;
    for (double t : pos_trusts) {
        const double c = clamp_trust(t);
        log_pos_terms.push_back(std::log(c));
        log_neg_terms.push_back(std::log1p(-c));
    }
    for (double t : neg_trusts) {
        const double c = clamp_trust(t);
        log_pos_terms.push_back(std::log1p(-c));
        log_neg_terms.push_back(std::log(c));
    }
    const double log_pos = std::log(prior_pos) + ordered_sum(log_pos_terms);
    const double log_neg = std::log1p(-prior_pos) + ordered_sum(log_neg_terms);
    // Logistic of the log-odds, evaluated on each side for label symmetry.
    return {1.0 / (1.0 + std::exp(log_neg - log_pos)), 1.0 / (1.0 + std::exp(log_pos - log_neg))};
}

Posterior weighted_vote(std::span<const double> pos_trusts, std::span<const double> neg_trusts) {
    check_trusts(pos_trusts, "weighted_vote");
    check_trusts(neg_trusts, "weighted_vote");
    const double pos = ordered_sum(pos_trusts);
    const double neg = ordered_sum(neg_trusts);
    const double total = pos + neg;
    if (total <= 0.0) {
        return {0.5, 0.5};
    }
    return {pos / total, neg / total};
}

Posterior majority_vote(std::size_t n_pos, std::size_t n_neg) {
    const std::vector<double> pos(n_pos, 1.0);
    const std::vector<double> neg(n_neg, 1.0);
    return weighted_vote(pos, neg);
}

Decision make_decision(Posterior p, double avg_uncertainty) {
    Decision d;
    d.p_pos = p.pos;
    d.p_neg = p.neg;
    d.confidence = std::abs(p.pos - p.neg);
    d.avg_uncertainty = avg_uncertainty;
    if (p.pos > p.neg) {
        d.reward = Reward::positive;
    } else if (p.neg > p.pos) {
        d.reward = Reward::negative;
    } else {
        d.reward = Reward::tie;
    }
    return d;
}

Decision bwve_blend(Posterior bayes, Posterior vote, double avg_uncertainty) {
    if (!(avg_uncertainty >= 0.0 && avg_uncertainty <= 1.0)) {
        throw std::invalid_argument("bwve_blend: average uncertainty must lie in [0, 1]");
    }
    const double w = avg_uncertainty;
    return make_decision({(1.0 - w) * bayes.pos + w * vote.pos, (1.0 - w) * bayes.neg + w * vote.neg}, w);
}

double average_uncertainty(const FeedbackSet& feedback, const TrustStore& store) {
    const auto ids = feedback.distinct_trainers();
    if (ids.empty()) {
        return 1.0;
    }
    double sum = 0.0;
    for (const auto& id : ids) {
        sum += store.uncertainty(id);
    }
    return sum / static_cast<double>(ids.size());
}

Decision bwve_decide(const FeedbackSet& feedback, const TrustStore& store) {
    if (feedback.empty()) {
        return make_decision({0.5, 0.5}, 1.0);
    }
    const auto trusts = split_trusts(feedback, store);
    return bwve_blend(bayes_posterior(trusts.pos, trusts.neg), weighted_vote(trusts.pos, trusts.neg),
                      average_uncertainty(feedback, store));
}

Decision decide(Method method, const FeedbackSet& feedback, const TrustStore& store) {
    if (method == Method::majority) {
        // No trust model behind a plain vote: report full uncertainty.
        return make_decision(majority_vote(feedback.count(Vote::positive), feedback.count(Vote::negative)), 1.0);
    }
    if (method == Method::bwve) {
        return bwve_decide(feedback, store);
    }
    const auto trusts = split_trusts(feedback, store);
    const double u = average_uncertainty(feedback, store);
    if (method == Method::bayes) {
        return make_decision(bayes_posterior(trusts.pos, trusts.neg), u);
    }
    return make_decision(weighted_vote(trusts.pos, trusts.neg), u);
}

void apply_evidence_updates(const Decision& decision, const FeedbackSet& feedback, TrustStore& store) {
    for (const auto& e : feedback.events()) {
        if (!store.contains(e.trainer)) {
            throw UnknownTrainer(e.trainer);
        }
    }
    if (decision.reward == Reward::tie) {
        return;
    }
    const Vote winner = decision.reward == Reward::positive ? Vote::positive : Vote::negative;
    for (const auto& e : feedback.events()) {
        store.add_evidence(e.trainer, e.value == winner ? Vote::positive : Vote::negative, decision.confidence);
    }
}

}  // namespace mtirl
