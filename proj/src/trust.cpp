#include "mtirl/trust.hpp"

#include "csv_util.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace mtirl {

namespace {

// Subjective-logic non-informative prior weight.
constexpr double kPriorWeight = 2.0;

void require_evidence(double v, const char* field) {
    if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(std::string("TrustRecord: ") + field + " must be finite and >= 0");
    }
}

}  // namespace

TrustRecord::TrustRecord(double alpha, double beta, double base_rate)
    : alpha_(alpha), beta_(beta), base_rate_(base_rate) {
    require_evidence(alpha, "alpha");
    require_evidence(beta, "beta");
    if (!(base_rate >= 0.0 && base_rate <= 1.0)) {
        throw std::invalid_argument("TrustRecord: base_rate must lie in [0, 1]");
    }
}

BeliefMass belief_mass(const TrustRecord& rec) noexcept {
    const double denom = rec.alpha() + rec.beta() + kPriorWeight;
    return {rec.alpha() / denom, rec.beta() / denom, kPriorWeight / denom};
}

double trustworthiness(const TrustRecord& rec) noexcept {
    const BeliefMass m = belief_mass(rec);
    return m.belief + rec.base_rate() * m.uncertainty;
}

TrustRecord add_evidence(const TrustRecord& rec, Vote direction, double step) {
    if (!std::isfinite(step) || step < 0.0) {
        throw std::invalid_argument("add_evidence: step must be finite and >= 0");
    }
    if (direction == Vote::positive) {
        return TrustRecord(rec.alpha() + step, rec.beta(), rec.base_rate());
    }
    return TrustRecord(rec.alpha(), rec.beta() + step, rec.base_rate());
}

const TrustRecord& TrustStore::ensure(const TrainerId& id, double base_rate) {
    auto it = records_.find(id);
    if (it == records_.end()) {
        it = records_.emplace(id, TrustRecord(0.0, 0.0, base_rate)).first;
    }
    return it->second;
}

const TrustRecord& TrustStore::at(const TrainerId& id) const {
    const auto it = records_.find(id);
    if (it == records_.end()) {
        throw UnknownTrainer(id);
    }
    return it->second;
}

void TrustStore::add_evidence(const TrainerId& id, Vote direction, double step) {
    const auto it = records_.find(id);
    if (it == records_.end()) {
        throw UnknownTrainer(id);
    }
    it->second = mtirl::add_evidence(it->second, direction, step);
}

void TrustStore::save_csv(std::ostream& out) const {
    out << "trainer_id,alpha,beta,base_rate\n";
    for (const auto& [id, rec] : records_) {
        out << id << ',' << detail::shortest(rec.alpha()) << ',' << detail::shortest(rec.beta()) << ','
            << detail::shortest(rec.base_rate()) << '\n';
    }
}

TrustStore TrustStore::load_csv(std::istream& in) {
    TrustStore store;
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "trainer_id,alpha,beta,base_rate") {
        throw std::invalid_argument("trust CSV: missing header 'trainer_id,alpha,beta,base_rate'");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto cols = detail::split(detail::trim(line), ',');
        if (cols.size() != 4 || cols[0].empty()) {
            throw std::invalid_argument("trust CSV line " + std::to_string(line_no) + ": expected 4 columns");
        }
        TrustRecord rec(detail::parse_double(cols[1], "alpha"), detail::parse_double(cols[2], "beta"),
                        detail::parse_double(cols[3], "base_rate"));
        if (!store.records_.emplace(cols[0], rec).second) {
            throw std::invalid_argument("trust CSV: duplicate trainer_id '" + cols[0] + "'");
        }
    }
    return store;
}

}  // namespace mtirl
