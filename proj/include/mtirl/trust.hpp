#pragma once

#include "mtirl/feedback.hpp"

#include <iosfwd>
#include <map>
#include <stdexcept>

namespace mtirl {

/// Subjective-logic opinion about one trainer.
struct BeliefMass {
    double belief = 0.0;
    double disbelief = 0.0;
    double uncertainty = 1.0;
};

/// Accumulated positive (alpha) and negative (beta) evidence about a trainer
/// plus the immutable prior trust (base rate).
class TrustRecord {
public:
    static constexpr double kDefaultBaseRate = 0.5;

    TrustRecord() = default;
    explicit TrustRecord(double alpha, double beta = 0.0, double base_rate = kDefaultBaseRate);

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double base_rate() const noexcept { return base_rate_; }
    [[nodiscard]] double total_evidence() const noexcept { return alpha_ + beta_; }

    friend bool operator==(const TrustRecord&, const TrustRecord&) = default;

private:
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double base_rate_ = kDefaultBaseRate;
};

/// (α, β) → (α/(α+β+2), β/(α+β+2), 2/(α+β+2)).
BeliefMass belief_mass(const TrustRecord& rec) noexcept;

/// P(x) = b + a·u.
double trustworthiness(const TrustRecord& rec) noexcept;

/// Adds `step` to α (positive) or β (negative). Throws std::invalid_argument
/// on a negative or non-finite step.
TrustRecord add_evidence(const TrustRecord& rec, Vote direction, double step);

class UnknownTrainer : public std::out_of_range {
public:
    explicit UnknownTrainer(const TrainerId& id)
        : std::out_of_range("unknown trainer id '" + id + "'"), id_(id) {}
    [[nodiscard]] const TrainerId& id() const noexcept { return id_; }

private:
    TrainerId id_;
};

/// trainer_id → TrustRecord, owned by a single session or experiment run.
class TrustStore {
public:
    TrustStore() = default;

    /// Registers `id` with fresh evidence if absent; returns the stored record.
    const TrustRecord& ensure(const TrainerId& id, double base_rate = TrustRecord::kDefaultBaseRate);

    [[nodiscard]] bool contains(const TrainerId& id) const { return records_.contains(id); }
    [[nodiscard]] const TrustRecord& at(const TrainerId& id) const;
    [[nodiscard]] double trust(const TrainerId& id) const { return trustworthiness(at(id)); }
    [[nodiscard]] double uncertainty(const TrainerId& id) const { return belief_mass(at(id)).uncertainty; }

    void add_evidence(const TrainerId& id, Vote direction, double step);

    [[nodiscard]] const std::map<TrainerId, TrustRecord>& records() const noexcept { return records_; }
    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }

    /// CSV with header `trainer_id,alpha,beta,base_rate`; values round-trip exactly.
    void save_csv(std::ostream& out) const;
    static TrustStore load_csv(std::istream& in);

    friend bool operator==(const TrustStore&, const TrustStore&) = default;

private:
    std::map<TrainerId, TrustRecord> records_;
};

}  // namespace mtirl
