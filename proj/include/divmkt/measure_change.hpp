#pragma once

#include "divmkt/params.hpp"
#include "divmkt/portfolio.hpp"
#include "divmkt/sde_core.hpp"

#include <cstdint>
#include <span>
#include <string>

namespace divmkt {

/// Market price of risk for rank k (1-based) among n companies.
double theta(int n, int k, const ModelParams& params, ThetaMode mode);
double theta(int n, int k, const ModelParams& params);

/// max |theta| over the whole table, the constant C in <M>(T) <= C^2 T max N.
double theta_bound(const ModelParams& params, ThetaMode mode);

/// Running Girsanov density Z = exp(-M - <M>/2), kept in log space.
struct GirsanovState {
    double m = 0.0;  ///< stochastic integral sum theta dW
    double qv = 0.0; ///< quadratic variation <M>

    double log_z() const noexcept { return -m - 0.5 * qv; }
    double z() const noexcept;
};

/// Adds one step to the density using the same Gaussians as the concurrent
/// Euler step; ranks are those of `state`, the state at the step start.
GirsanovState accumulate(GirsanovState gs, const MarketState& state, const ModelParams& params,
                         std::span<const double> noise, double h);

/// Hot-path form: `theta_row[k]` for 0-based rank k, `rank_of[i]` from the step.
void accumulate(GirsanovState& gs, std::span<const double> theta_row, std::span<const int> rank_of,
                std::span<const double> noise, double h) noexcept;

struct MartingaleEstimate {
    std::string portfolio;
    ThetaMode mode = ThetaMode::Martingale;
    SampleSummary z;        ///< E^P[Z(T)]
    SampleSummary weighted; ///< E^P[Z(T) V^pi(T)]
    std::size_t failed_paths = 0;

    /// Both means within `k` standard errors of 1.
    bool consistent(double k = 3.0) const noexcept;
};

/// Estimates E^P[Z(T) V^pi(T)] with Z built in params.theta_mode. The
/// no-arbitrage claim predicts 1 in martingale mode.
MartingaleEstimate martingale_test(const ModelParams& params, const MarketState& initial, const PortfolioRule& rule,
                                   double horizon, std::size_t paths, std::uint64_t seed, int workers = 1);

} // namespace divmkt
