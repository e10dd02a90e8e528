#include "mtirl/feedback.hpp"

namespace mtirl {

std::string_view to_string(Vote v) noexcept {
    return v == Vote::positive ? "positive" : "negative";
}

std::optional<Vote> parse_vote(std::string_view text) noexcept {
    if (text == "positive" || text == "pos" || text == "+") {
        return Vote::positive;
    }
    if (text == "negative" || text == "neg" || text == "-") {
        return Vote::negative;
    }
    return std::nullopt;
}

void FeedbackSet::merge(const FeedbackSet& other) {
    events_.insert(events_.end(), other.events_.begin(), other.events_.end());
}

std::size_t FeedbackSet::count(Vote value) const noexcept {
    std::size_t n = 0;
    for (const auto& e : events_) {
        n += e.value == value ? 1U : 0U;
    }
    return n;
}

std::set<TrainerId> FeedbackSet::distinct_trainers() const {
    std::set<TrainerId> ids;
    for (const auto& e : events_) {
        ids.insert(e.trainer);
    }
    return ids;
}

}  // namespace mtirl
