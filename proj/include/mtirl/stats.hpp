#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mtirl::stats {

struct MannWhitney {
    double u = 0.0;  // U of the first sample: #(a > b) + ½·#(a = b)
    double p_value = 1.0;
    bool exact = false;
};

/// Samples up to this size (each) get the exact permutation p-value.
inline constexpr std::size_t kExactMaxSize = 8;

/// Two-sided Mann–Whitney U with midranks. Exact p when both samples have at
/// most kExactMaxSize elements, normal approximation with tie and continuity
/// correction otherwise. Throws std::invalid_argument on an empty sample.
MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Exact two-sided permutation p-value for the observed U (handles ties).
double mann_whitney_exact_p(std::span<const double> a, std::span<const double> b);
/// Normal approximation with tie-corrected variance and 0.5 continuity correction.
double mann_whitney_normal_p(std::span<const double> a, std::span<const double> b);

/// Midranks (1-based) of the pooled values, in input order.
std::vector<double> midranks(std::span<const double> values);

constexpr double bonferroni_alpha(double alpha, std::size_t comparisons) noexcept {
    return comparisons == 0 ? alpha : alpha / static_cast<double>(comparisons);
}

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double ci_low = 0.0;   // mean ± 1.96·s/√n
    double ci_high = 0.0;
};

Summary summarize(std::span<const double> values);

double normal_cdf(double z) noexcept;

}  // namespace mtirl::stats
