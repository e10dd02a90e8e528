#include "mtirl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace mtirl::stats {

namespace {

void require_samples(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("mann_whitney_u: both samples must be non-empty");
    }
}

std::vector<double> pooled(std::span<const double> a, std::span<const double> b) {
    std::vector<double> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    return all;
}

double u_statistic(const std::vector<double>& ranks, std::size_t na) {
    const double rank_sum = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(na), 0.0);
    const auto n = static_cast<double>(na);
    return rank_sum - n * (n + 1.0) / 2.0;
}

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0U);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = mid;
        }
        i = j + 1;
    }
    return ranks;
}

double mann_whitney_exact_p(std::span<const double> a, std::span<const double> b) {
    require_samples(a, b);
    const auto all = pooled(a, b);
    const auto ranks = midranks(all);
    const std::size_t na = a.size();
    const std::size_t n = all.size();

    // Midranks are multiples of 1/2, so doubled ranks are integers.
    std::vector<int> doubled(n);
    for (std::size_t k = 0; k < n; ++k) {
        doubled[k] = static_cast<int>(std::lround(2.0 * ranks[k]));
    }
    const int max_sum = std::accumulate(doubled.begin(), doubled.end(), 0);

    // ways[k][s]: subsets of size k whose doubled rank sum is s.
    std::vector<std::vector<double>> ways(na + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t item = 0; item < n; ++item) {
        const int r = doubled[item];
        for (std::size_t k = std::min(item + 1, na); k >= 1; --k) {
            auto& dst = ways[k];
            const auto& src = ways[k - 1];
            for (int s = max_sum; s >= r; --s) {
                dst[static_cast<std::size_t>(s)] += src[static_cast<std::size_t>(s - r)];
            }
        }
    }

    // 2U = 2R - na(na+1); compare |2U - na·nb| on integers.
    const auto base = static_cast<long long>(na * (na + 1));
    const auto centre = static_cast<long long>(na * b.size());
    long long observed_sum = 0;
    for (std::size_t k = 0; k < na; ++k) {
        observed_sum += doubled[k];
    }
    const long long observed_dev = std::llabs(observed_sum - base - centre);

    double extreme = 0.0;
    double total = 0.0;
    for (int s = 0; s <= max_sum; ++s) {
        const double w = ways[na][static_cast<std::size_t>(s)];
        if (w == 0.0) {
            continue;
        }
        total += w;
        if (std::llabs(static_cast<long long>(s) - base - centre) >= observed_dev) {
            extreme += w;
        }
    }
    return std::min(1.0, extreme / total);
}

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double mann_whitney_normal_p(std::span<const double> a, std::span<const double> b) {
    require_samples(a, b);
    const auto all = pooled(a, b);
    const auto ranks = midranks(all);
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    const double n = na + nb;
    const double u = u_statistic(ranks, a.size());
    const double mu = na * nb / 2.0;

    // Tie correction: Σ(t³ - t) over groups of tied values.
    std::vector<double> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    double tie_sum = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) {
            ++j;
        }
        const auto t = static_cast<double>(j - i);
        tie_sum += t * t * t - t;
        i = j;
    }
    const double var = na * nb / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
    if (!(var > 0.0)) {
        return 1.0;
    }
    const double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(var);
    return std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
}

MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    require_samples(a, b);
    const auto ranks = midranks(pooled(a, b));
    MannWhitney r;
    r.u = u_statistic(ranks, a.size());
    r.exact = a.size() <= kExactMaxSize && b.size() <= kExactMaxSize;
    r.p_value = r.exact ? mann_whitney_exact_p(a, b) : mann_whitney_normal_p(a, b);
    return r;
}

Summary summarize(std::span<const double> values) {
    Summary s;
    s.n = values.size();
    if (values.empty()) {
        return s;
    }
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
    double half_width = 0.0;
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
        half_width = 1.96 * sd / std::sqrt(static_cast<double>(s.n));
    }
    s.ci_low = s.mean - half_width;
    s.ci_high = s.mean + half_width;
    return s;
}

}  // namespace mtirl::stats
