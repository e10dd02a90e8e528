#pragma once

#include "mtirl/aggregate.hpp"
#include "mtirl/gridworld.hpp"
#include "mtirl/random.hpp"

#include <functional>
#include <map>
#include <string>

namespace mtirl {

/// Historical feedback per state-action pair. Entries only grow; an entry
/// exists iff the pair has been queried at least once. The decision made on
/// the first query is kept for the review-free variant.
class FeedbackArchive {
public:
    struct Entry {
        FeedbackSet feedback;
        Decision first_decision;
    };

    [[nodiscard]] const Entry* find(const StateAction& key) const;
    [[nodiscard]] bool contains(const StateAction& key) const { return entries_.contains(key); }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] const std::map<StateAction, Entry>& entries() const noexcept { return entries_; }

    /// First query of `key`: creates the entry.
    void record_first(const StateAction& key, const FeedbackSet& fresh, const Decision& decision);
    /// Later query of `key`: appends fresh events to the existing entry.
    void append(const StateAction& key, const FeedbackSet& fresh);

    /// `{"entries":[{"state":[x,y],"action":"up","feedback":[["t0","positive"],...]}]}`
    [[nodiscard]] std::string to_json() const;
    /// Rebuilds an archive; first decisions are recomputed against `store`.
    static FeedbackArchive from_json(std::string_view text, const TrustStore& store);

private:
    std::map<StateAction, Entry> entries_;
};

/// 1 - i' where i' is the confidence of the archived set re-decided with the
/// current trust records. Empty entry → 1.
double review_probability(const FeedbackSet& entry, const TrustStore& store);

using QueryFn = std::function<FeedbackSet(const StateAction&)>;

struct Resolution {
    Decision decision;
    bool queried = false;
};

struct ResolveOptions {
    /// false: seen pairs return the first decision ever made (no re-query).
    bool review = true;
};

/// Feedback review model. Unseen pairs are always queried; seen pairs are
/// re-queried with probability review_probability, merging history with the
/// fresh round. Evidence is paid only by fresh responders.
Resolution resolve(const StateAction& key, FeedbackArchive& archive, TrustStore& store, const QueryFn& query,
                   Rng& rng, ResolveOptions options = {});

}  // namespace mtirl
