#pragma once

#include "divmkt/params.hpp"
#include "divmkt/random.hpp"
#include "divmkt/sde_core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace divmkt {

/// Fraction of the parent's capitalization kept by the first child.
struct SplitDraw {
    double xi;
};

SplitDraw sample_split_fraction(const ModelParams& params, PathStream& stream);

enum class EventKind { Split, Merger, SuppressedMerger };

std::string_view to_string(EventKind kind) noexcept;

/// One split, merger or suppressed merger. Indices are 0-based positions in
/// caps_before; `j` is only meaningful for (suppressed) mergers and `xi` only
/// for splits.
struct EventRecord {
    double time = 0.0;
    EventKind kind = EventKind::Split;
    std::size_t i = 0;
    std::size_t j = 0;
    double xi = 0.0;
    int n_before = 0;
    int n_after = 0;
    std::vector<double> caps_before;
    std::vector<double> caps_after;
    std::vector<std::uint64_t> parents;  ///< lineage ids consumed by the event
    std::vector<std::uint64_t> children; ///< lineage ids created by the event
};

/// One JSON object per line: t, kind, i, j, xi, n_before, n_after (company
/// indices 1-based, null where not applicable), plus lineage ids and the
/// optional path number.
std::string to_json_line(const EventRecord& event, std::optional<std::uint64_t> path = std::nullopt);

/// lambda_N: zero for N = 2, c N^alpha otherwise.
double clock_rate(int n, double c, double alpha);
double clock_rate(int n, const ModelParams& params);

/// Exponential merger clock, redrawn at the new rate after every event.
struct MergerClock {
    double remaining = 0.0;

    static MergerClock draw(int n, const ModelParams& params, PathStream& stream);
};

/// Index whose weight is at or above 1 - delta, if any. At most one exists.
std::optional<std::size_t> detect_split(const MarketState& state, const ModelParams& params);

/// Company i becomes companies N and N+1 (in 1-based names) holding xi X_i and
/// (1 - xi) X_i. The second child is computed as X_i minus the first, so the
/// two children sum to the parent exactly.
MarketState apply_split(const MarketState& state, std::size_t i, SplitDraw draw);

/// Pair (i, j), i < j, uniform over the two-element subsets that exclude the
/// lexicographically top-ranked company. Needs N >= 3.
std::pair<std::size_t, std::size_t> sample_merger_pair(const MarketState& state, PathStream& stream);

bool merger_suppressed(const MarketState& state, std::size_t i, std::size_t j, const ModelParams& params);

/// Companies i and j merge into company N - 1 (1-based) with X_i + X_j.
/// Throws ContractViolation when the merger would be suppressed.
MarketState apply_merger(const MarketState& state, std::size_t i, std::size_t j, const ModelParams& params);

/// Resolves whatever event is due at the current state: a split if some
/// weight sits at or above the threshold, otherwise a merger if the clock has
/// rung. Splits take priority when both are due in the same step. The clock
/// is redrawn after every event.
std::optional<EventRecord> resolve_events(MarketState& state, const ModelParams& params, MergerClock& clock,
                                          PathStream& stream, bool clock_rang);

/// One Euler step of length h followed by event resolution. Draws the step's
/// Gaussians from `stream` into `ws.noise`.
std::optional<EventRecord> step_model(MarketState& state, const ModelParams& params, MergerClock& clock,
                                      PathStream& stream, StepWorkspace& ws, double h);

struct EventOutcome {
    MarketState state;
    std::optional<EventRecord> event;
};

/// Steps until the first split, merger clock expiry or the horizon.
EventOutcome run_until_event(MarketState state, const ModelParams& params, MergerClock& clock, PathStream& stream,
                             double horizon);

/// Length of the next step: dt, or what is left until the horizon.
/// Zero once the horizon is reached.
double next_step_length(double t, double horizon, double dt) noexcept;

} // namespace divmkt
