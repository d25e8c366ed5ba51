#include "divmkt/stats.hpp"

#include "divmkt/errors.hpp"

#include <cmath>
#include <vector>

namespace divmkt {

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) {
        throw ContractViolation("Wilson interval needs at least one trial");
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

Proportion proportion(std::size_t hits, std::size_t trials, double z) {
    Proportion out;
    out.hits = hits;
    out.trials = trials;
    out.estimate = static_cast<double>(hits) / static_cast<double>(trials);
    out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
    out.ci = wilson_interval(hits, trials, z);
    return out;
}

double pairwise_sum(std::span<const double> values) noexcept {
    if (values.size() <= 16) {
        double s = 0.0;
        for (double v : values) {
            s += v;
        }
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleSummary summarize(std::span<const double> values) {
    SampleSummary out;
    out.count = values.size();
    if (values.empty()) {
        return out;
    }
    const double n = static_cast<double>(values.size());
    out.mean = pairwise_sum(values) / n;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - out.mean;
        sq[i] = d * d;
    }
    out.variance = values.size() > 1 ? pairwise_sum(sq) / (n - 1.0) : 0.0;
    out.std_error = std::sqrt(out.variance / n);
    return out;
}

} // namespace divmkt
