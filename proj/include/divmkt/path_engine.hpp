#pragma once

#include "divmkt/market_events.hpp"
#include "divmkt/measure_change.hpp"
#include "divmkt/params.hpp"
#include "divmkt/portfolio.hpp"
#include "divmkt/sde_core.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace divmkt {

struct PathOptions {
    double horizon = 1.0;
    bool events_enabled = true;
    /// Record a series sample every `series_stride` steps (0: no series).
    std::size_t series_stride = 0;
    bool record_events = false;
    /// Record X_i(T) / X_i(0) per company; only meaningful without events.
    bool single_names = false;
};

struct SeriesSample {
    double t = 0.0;
    int n = 0;
    double top_weight = 0.0;
    double market_wealth = 1.0;
    std::vector<double> wealth;
    double z = 1.0;
};

enum class PathStatus { Ok, ExplosionGuard, Overflow, NonPositiveWealth };

std::string_view to_string(PathStatus status) noexcept;

/// Invariant monitors accumulated along one path.
struct PathDiagnostics {
    /// Largest market weight seen after event resolution at any step.
    double max_weight = 0.0;
    /// Largest log(mu_i / (1 - delta)) at split detection.
    double max_split_overshoot = -std::numeric_limits<double>::infinity();
    /// Largest |C(T_m+) - C(T_m)| in units of ulp(C(T_m)).
    double max_cap_change_ulps = 0.0;
    /// Largest |sum pi after - sum pi before| over all transfers.
    double max_allocation_change = 0.0;
    /// Wealth of every rule identical across every event.
    bool wealth_continuous = true;
    /// Largest <M>(t) / (C^2 t max N) for the configured mode.
    double max_qv_ratio = 0.0;
    double min_z = std::numeric_limits<double>::infinity();
    std::size_t splits = 0;
    std::size_t mergers = 0;
    std::size_t suppressed = 0;
    std::size_t suppressed_three_plus = 0;
};

struct PathResult {
    std::uint64_t path = 0;
    PathStatus status = PathStatus::Ok;
    std::string diagnostic;
    double t_end = 0.0;
    int n_end = 0;
    /// Largest company count reached; n_max + 1 when the explosion guard fired.
    int max_count = 0;
    double cap_initial = 0.0;
    double cap_final = 0.0;
    double market_wealth = 1.0;
    std::vector<double> wealth; ///< one per rule, in rule order
    GirsanovState martingale;   ///< density in ThetaMode::Martingale
    GirsanovState paper;        ///< density in ThetaMode::Paper
    std::vector<double> single_name_ratio;
    PathDiagnostics diag;
    std::vector<EventRecord> events;
    std::vector<SeriesSample> series;

    bool ok() const noexcept { return status == PathStatus::Ok; }
    const GirsanovState& girsanov(ThetaMode mode) const noexcept {
        return mode == ThetaMode::Martingale ? martingale : paper;
    }
};

using RuleSet = std::vector<std::unique_ptr<PortfolioRule>>;

/// Simulates one path of the full model on [initial.t, horizon] from the
/// stream (seed, path), tracking the market portfolio, every rule in
/// `rules` and both Girsanov densities.
PathResult simulate_path(const ModelParams& params, const MarketState& initial, const RuleSet& rules,
                         const PathOptions& options, std::uint64_t seed, std::uint64_t path);

std::vector<PathResult> simulate_paths(const ModelParams& params, const MarketState& initial, const RuleSet& rules,
                                       const PathOptions& options, std::uint64_t seed, std::size_t count,
                                       int workers);

RuleSet clone_rules(const RuleSet& rules);

} // namespace divmkt
