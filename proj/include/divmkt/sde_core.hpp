#pragma once

#include "divmkt/params.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace divmkt {

/// Capitalizations of the extant companies at time t. Company i sits at
/// position i (0-based here; the model's names are i + 1).
struct MarketState {
    double t = 0.0;
    std::vector<double> caps;
    /// Stable company identities carried across renamings, for diagnostics.
    std::vector<std::uint64_t> lineage;
    std::uint64_t next_lineage = 0;

    static MarketState from_caps(std::vector<double> caps, double t = 0.0);
    static MarketState equal_caps(int n, double cap = 1.0);

    int size() const noexcept { return static_cast<int>(caps.size()); }
    /// Throws ContractViolation unless N >= 2 and every cap is finite and > 0.
    void validate() const;
};

/// rank_to_index[r] is the company holding rank r + 1. Caps are non-increasing
/// along the permutation and equal caps are ordered by lower index first.
struct RankAssignment {
    std::vector<std::size_t> rank_to_index;
};

RankAssignment rank(const MarketState& state);

/// Re-sorts `order` into rank order for `caps`. Starting from the previous
/// step's order makes this linear when few ranks change.
void rank_into(std::span<const double> caps, std::vector<std::size_t>& order);

/// Sum of capitalizations with Neumaier compensation, so regrouping the same
/// summands changes the result by at most a rounding of the total.
double total_capitalization(std::span<const double> caps) noexcept;

std::vector<double> market_weights(const MarketState& state);

/// Buffers reused across steps of one path.
struct StepWorkspace {
    std::vector<std::size_t> order; ///< rank -> index at the start of the last step
    std::vector<int> rank_of;       ///< index -> 0-based rank at the start of the last step
    std::vector<double> noise;      ///< standard Gaussians driving the next step
    std::vector<double> prev_caps;  ///< caps at the start of the last step

    void resize(int n);
};

/// Frozen-rank Euler step in place: ranks are taken at the step start and
/// log X_i moves by g(N, k_i) h + sigma(N, k_i) sqrt(h) noise_i. Uses
/// `ws.noise` and fills the rest of `ws`.
void advance(MarketState& state, const ModelParams& params, StepWorkspace& ws, double h);

MarketState euler_step(const MarketState& state, const ModelParams& params, std::span<const double> noise);
MarketState euler_step(const MarketState& state, const ModelParams& params, std::span<const double> noise, double h);

/// Excess growth rate of the market portfolio,
/// 1/2 sum_k sigma(N,k)^2 mu_(k) (1 - mu_(k)).
double excess_growth_rate(const MarketState& state, const ModelParams& params);

} // namespace divmkt
