#pragma once

#include "mtirl/feedback.hpp"
#include "mtirl/gridworld.hpp"
#include "mtirl/qtable.hpp"
#include "mtirl/random.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace mtirl {

struct TrainerProfile {
    TrainerId id;
    double true_trust = 1.0;
    double response_prob = 1.0;
};

/// Trusts drawn from Normal(mean, std) and clamped to [0, 1]. Ids are
/// "t0", "t1", ... Throws std::invalid_argument on n = 0 or bad parameters.
std::vector<TrainerProfile> sample_population(std::size_t n, double mean, double std_dev, double response_prob,
                                              Rng& rng);

/// Silent with probability 1 - response_prob; otherwise the correct value
/// with probability true_trust, else the flipped value. Always consumes two
/// uniforms so the stream does not depend on the outcome.
std::optional<FeedbackEvent> give_feedback(const TrainerProfile& profile, Vote correct, Rng& rng);

/// Ground truth from the optimal table: positive iff the action is best.
Vote gridworld_truth(const QTable& optimal, AgentState state, Action action);

/// CSV `id,true_trust,response_prob`.
void write_population_csv(std::ostream& out, const std::vector<TrainerProfile>& population);

}  // namespace mtirl
