#pragma once

#include <cstddef>
#include <span>

namespace divmkt {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

struct Proportion {
    std::size_t hits = 0;
    std::size_t trials = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    Interval ci;
};

Proportion proportion(std::size_t hits, std::size_t trials, double z = 1.96);

struct SampleSummary {
    double mean = 0.0;
    double std_error = 0.0;
    double variance = 0.0;
    std::size_t count = 0;
};

/// Pairwise sum in index order: deterministic and O(eps log n) accurate.
double pairwise_sum(std::span<const double> values) noexcept;

SampleSummary summarize(std::span<const double> values);

} // namespace divmkt
