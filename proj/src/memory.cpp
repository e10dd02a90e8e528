#include "mtirl/memory.hpp"

#include <nlohmann/json.hpp>

namespace mtirl {

const FeedbackArchive::Entry* FeedbackArchive::find(const StateAction& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void FeedbackArchive::record_first(const StateAction& key, const FeedbackSet& fresh, const Decision& decision) {
    const bool inserted = entries_.emplace(key, Entry{fresh, decision}).second;
    if (!inserted) {
        throw std::logic_error("FeedbackArchive: pair " + to_string(key.state) + "/" +
                               std::string(to_string(key.action)) + " already recorded");
    }
}

void FeedbackArchive::append(const StateAction& key, const FeedbackSet& fresh) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw std::logic_error("FeedbackArchive: append to unseen pair " + to_string(key.state));
    }
    it->second.feedback.merge(fresh);
}

std::string FeedbackArchive::to_json() const {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& [key, entry] : entries_) {
        nlohmann::ordered_json feedback = nlohmann::ordered_json::array();
        for (const auto& e : entry.feedback.events()) {
            feedback.push_back({e.trainer, to_string(e.value)});
        }
        nlohmann::ordered_json item;
        item["state"] = {key.state.x, key.state.y};
        item["action"] = to_string(key.action);
        item["feedback"] = std::move(feedback);
        entries.push_back(std::move(item));
    }
    nlohmann::ordered_json root;
    root["entries"] = std::move(entries);
    return root.dump(2);
}

FeedbackArchive FeedbackArchive::from_json(std::string_view text, const TrustStore& store) {
    FeedbackArchive archive;
    const auto root = nlohmann::json::parse(text);
    for (const auto& item : root.at("entries")) {
        const auto& st = item.at("state");
        const auto action = parse_action(item.at("action").get<std::string>());
        if (!action || !st.is_array() || st.size() != 2) {
            throw std::invalid_argument("archive JSON: malformed entry " + item.dump());
        }
        FeedbackSet set;
        for (const auto& ev : item.at("feedback")) {
            const auto vote = parse_vote(ev.at(1).get<std::string>());
            if (!vote) {
                throw std::invalid_argument("archive JSON: bad feedback value in " + ev.dump());
            }
            set.add(ev.at(0).get<std::string>(), *vote);
        }
        const StateAction key{{st[0].get<int>(), st[1].get<int>()}, *action};
        archive.record_first(key, set, bwve_decide(set, store));
    }
    return archive;
}

double review_probability(const FeedbackSet& entry, const TrustStore& store) {
    if (entry.empty()) {
        return 1.0;
    }
    return 1.0 - bwve_decide(entry, store).confidence;
}

Resolution resolve(const StateAction& key, FeedbackArchive& archive, TrustStore& store, const QueryFn& query,
                   Rng& rng, ResolveOptions options) {
    const FeedbackArchive::Entry* entry = archive.find(key);
    if (entry == nullptr) {
        const FeedbackSet fresh = query(key);
        const Decision decision = bwve_decide(fresh, store);
        archive.record_first(key, fresh, decision);
        apply_evidence_updates(decision, fresh, store);
        return {decision, true};
    }
    if (!options.review) {
        return {entry->first_decision, false};
    }

    const Decision recomputed = bwve_decide(entry->feedback, store);
    const double p_review = 1.0 - recomputed.confidence;
    if (!(uniform01(rng) < p_review)) {
        return {recomputed, false};
    }

    const FeedbackSet fresh = query(key);
    FeedbackSet merged = entry->feedback;
    merged.merge(fresh);
    const Decision decision = bwve_decide(merged, store);
    archive.append(key, fresh);
    apply_evidence_updates(decision, fresh, store);
    return {decision, true};
}

}  // namespace mtirl
