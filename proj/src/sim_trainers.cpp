#include "mtirl/sim_trainers.hpp"

#include "mtirl/oracle.hpp"

#include "csv_util.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mtirl {

std::vector<TrainerProfile> sample_population(std::size_t n, double mean, double std_dev, double response_prob,
                                              Rng& rng) {
    if (n == 0) {
        throw std::invalid_argument("sample_population: n must be positive");
    }
    if (!(mean >= 0.0 && mean <= 1.0)) {
        throw std::invalid_argument("sample_population: mean must lie in [0, 1]");
    }
    if (!(std_dev >= 0.0) || !std::isfinite(std_dev)) {
        throw std::invalid_argument("sample_population: std must be finite and >= 0");
    }
    if (!(response_prob >= 0.0 && response_prob <= 1.0)) {
        throw std::invalid_argument("sample_population: response_prob must lie in [0, 1]");
    }
    std::vector<TrainerProfile> out;
    out.reserve(n);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        // std = 0 must give exactly `mean`, so draw a standard normal and scale.
        const double z = gauss(rng);
        const double trust = std_dev == 0.0 ? mean : std::clamp(mean + std_dev * z, 0.0, 1.0);
        out.push_back({"t" + std::to_string(i), trust, response_prob});
    }
    return out;
}

std::optional<FeedbackEvent> give_feedback(const TrainerProfile& profile, Vote correct, Rng& rng) {
    const double respond = uniform01(rng);
    const double honest = uniform01(rng);
    if (!(respond < profile.response_prob)) {
        return std::nullopt;
    }
    return FeedbackEvent{profile.id, honest < profile.true_trust ? correct : flip(correct)};
}

Vote gridworld_truth(const QTable& optimal, AgentState state, Action action) {
    return is_best_action(optimal, state, action) ? Vote::positive : Vote::negative;
}

void write_population_csv(std::ostream& out, const std::vector<TrainerProfile>& population) {
    out << "trainer_id,true_trust,response_prob\n";
    for (const auto& p : population) {
        out << p.id << ',' << detail::shortest(p.true_trust) << ',' << detail::shortest(p.response_prob) << '\n';
    }
}

}  // namespace mtirl
