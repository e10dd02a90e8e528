#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mtirl {

using TrainerId = std::string;

/// Binary trainer feedback: the action is (or is not) the best one.
enum class Vote : std::uint8_t { positive, negative };

constexpr Vote flip(Vote v) noexcept {
    return v == Vote::positive ? Vote::negative : Vote::positive;
}

std::string_view to_string(Vote v) noexcept;
std::optional<Vote> parse_vote(std::string_view text) noexcept;

struct FeedbackEvent {
    TrainerId trainer;
    Vote value = Vote::positive;

    friend bool operator==(const FeedbackEvent&, const FeedbackEvent&) = default;
};

/// Multiset of feedback events for one query. The same trainer may appear
/// more than once after a review round merges historical and fresh feedback.
class FeedbackSet {
public:
    FeedbackSet() = default;
    explicit FeedbackSet(std::vector<FeedbackEvent> events) : events_(std::move(events)) {}

    void add(FeedbackEvent event) { events_.push_back(std::move(event)); }
    void add(TrainerId trainer, Vote value) { events_.push_back({std::move(trainer), value}); }

    /// Multiset union: appends every event of `other`.
    void merge(const FeedbackSet& other);

    [[nodiscard]] const std::vector<FeedbackEvent>& events() const noexcept { return events_; }
    [[nodiscard]] bool empty() const noexcept { return events_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return events_.size(); }
    [[nodiscard]] std::size_t count(Vote value) const noexcept;

    /// Trainers in P_t ∪ N_t, each listed once.
    [[nodiscard]] std::set<TrainerId> distinct_trainers() const;

    friend bool operator==(const FeedbackSet&, const FeedbackSet&) = default;

private:
    std::vector<FeedbackEvent> events_;
};

}  // namespace mtirl
