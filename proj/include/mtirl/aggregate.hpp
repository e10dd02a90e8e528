#pragma once

#include "mtirl/feedback.hpp"
#include "mtirl/trust.hpp"

#include <span>
#include <string_view>

namespace mtirl {

/// Probability that the positive (resp. negative) answer is the correct one.
struct Posterior {
    double pos = 0.5;
    double neg = 0.5;
};

enum class Reward : std::uint8_t { positive, negative, tie };

std::string_view to_string(Reward r) noexcept;

/// Aggregated outcome of one feedback round.
struct Decision {
    Reward reward = Reward::tie;
    double p_pos = 0.5;
    double p_neg = 0.5;
    double confidence = 0.0;       // |p_pos - p_neg|
    double avg_uncertainty = 1.0;  // mean u over distinct responders
};

/// Trusts are clamped to [kTrustFloor, 1 - kTrustFloor] before entering the
/// Bayesian likelihood.
inline constexpr double kTrustFloor = 1e-9;

/// Bayesian posterior under independent trainers:
///   L_pos = Π_{P} P(i) · Π_{N} (1 - P(j)),  L_neg = Π_{P} (1 - P(i)) · Π_{N} P(j)
/// normalised with the prior. Evaluated in log space.
Posterior bayes_posterior(std::span<const double> pos_trusts, std::span<const double> neg_trusts,
                          double prior_pos = 0.5);

/// Trust-weighted vote share. Empty input or all-zero weights give (0.5, 0.5).
Posterior weighted_vote(std::span<const double> pos_trusts, std::span<const double> neg_trusts);

/// Unweighted vote share (every trust = 1).
Posterior majority_vote(std::size_t n_pos, std::size_t n_neg);

/// Turns a posterior into a decision (reward sign and confidence).
Decision make_decision(Posterior p, double avg_uncertainty);

/// (1 - ū)·bayes + ū·vote, componentwise.
Decision bwve_blend(Posterior bayes, Posterior vote, double avg_uncertainty);

/// Bayesian and weighted-voting ensemble over a feedback multiset.
/// Empty feedback yields a tie with confidence 0 and ū = 1.
Decision bwve_decide(const FeedbackSet& feedback, const TrustStore& store);

enum class Method : std::uint8_t { bwve, bayes, weighted_vote, majority };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view text) noexcept;

/// Whether the method consumes (and updates) a trust model.
constexpr bool uses_trust(Method m) noexcept { return m != Method::majority; }

/// Decision by any of the four aggregators. `avg_uncertainty` is reported
/// for every method; only bwve uses it.
Decision decide(Method method, const FeedbackSet& feedback, const TrustStore& store);

/// Mean uncertainty over distinct responders; 1 for empty feedback.
double average_uncertainty(const FeedbackSet& feedback, const TrustStore& store);

/// Evidence step after a decision: agreeing voters gain α += i_t, dissenting
/// voters gain β += i_t. A tie changes nothing. Each event pays once, so a
/// trainer with k events receives k increments. Throws UnknownTrainer before
/// touching the store if any id is unresolvable.
void apply_evidence_updates(const Decision& decision, const FeedbackSet& feedback, TrustStore& store);

}  // namespace mtirl
