#include "divmkt/market_events.hpp"

#include "divmkt/errors.hpp"
#include "divmkt/renaming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "json.hpp"

namespace divmkt {

SplitDraw sample_split_fraction(const ModelParams& params, PathStream& stream) {
    const double width = 0.5 - params.eps0;
    switch (params.split.kind) {
    case SplitDistribution::Kind::Half:
        return {0.5};
    case SplitDistribution::Kind::Beta: {
        std::gamma_distribution<double> ga(params.split.beta_a, 1.0);
        std::gamma_distribution<double> gb(params.split.beta_b, 1.0);
        const double a = ga(stream);
        const double b = gb(stream);
        return {0.5 + width * (a / (a + b))};
    }
    case SplitDistribution::Kind::Uniform:
        break;
    }
    return {0.5 + width * stream.uniform()};
}

std::string_view to_string(EventKind kind) noexcept {
    switch (kind) {
    case EventKind::Split:
        return "split";
    case EventKind::Merger:
        return "merger";
    case EventKind::SuppressedMerger:
        return "suppressed_merger";
    }
    return "unknown";
}

std::string to_json_line(const EventRecord& event, std::optional<std::uint64_t> path) {
    nlohmann::ordered_json j;
    if (path) {
        j["path"] = *path;
    }
    j["t"] = event.time;
    j["kind"] = to_string(event.kind);
    j["i"] = event.i + 1;
    if (event.kind == EventKind::Split) {
        j["j"] = nullptr;
        j["xi"] = event.xi;
    } else {
        j["j"] = event.j + 1;
        j["xi"] = nullptr;
    }
    j["n_before"] = event.n_before;
    j["n_after"] = event.n_after;
    j["parents"] = event.parents;
    j["children"] = event.children;
    return j.dump();
}

double clock_rate(int n, double c, double alpha) {
    if (n < 2) {
        throw ContractViolation("clock rate needs N >= 2");
    }
    if (n == 2) {
        return 0.0;
    }
    return c * std::pow(static_cast<double>(n), alpha);
}

double clock_rate(int n, const ModelParams& params) { return clock_rate(n, params.clock_c, params.clock_alpha); }

MergerClock MergerClock::draw(int n, const ModelParams& params, PathStream& stream) {
    return {stream.exponential(clock_rate(n, params))};
}

std::optional<std::size_t> detect_split(const MarketState& state, const ModelParams& params) {
    const double total = total_capitalization(state.caps);
    const double threshold = 1.0 - params.delta;
    for (std::size_t i = 0; i < state.caps.size(); ++i) {
        if (state.caps[i] / total >= threshold) {
            return i;
        }
    }
    return std::nullopt;
}

MarketState apply_split(const MarketState& state, std::size_t i, SplitDraw draw) {
    if (i >= state.caps.size()) {
        throw ContractViolation("split index out of range");
    }
    if (!(draw.xi >= 0.5 && draw.xi < 1.0)) {
        throw ContractViolation("split fraction must lie in [1/2, 1)");
    }
    const double parent = state.caps[i];
    const double first = draw.xi * parent;
    const double second = parent - first;

    MarketState next;
    next.t = state.t;
    next.caps = rename_after_split<double>(state.caps, i, first, second);
    if (state.lineage.size() == state.caps.size()) {
        next.next_lineage = state.next_lineage + 2;
        next.lineage = rename_after_split<std::uint64_t>(state.lineage, i, state.next_lineage, state.next_lineage + 1);
    }
    return next;
}

std::pair<std::size_t, std::size_t> sample_merger_pair(const MarketState& state, PathStream& stream) {
    const std::size_t n = state.caps.size();
    if (n < 3) {
        throw ContractViolation("a merger pair needs at least three companies");
    }
    const auto top = static_cast<std::size_t>(std::max_element(state.caps.begin(), state.caps.end()) - state.caps.begin());
    const std::uint64_t m = static_cast<std::uint64_t>((n - 1) * (n - 2) / 2);
    std::uniform_int_distribution<std::uint64_t> pick(0, m - 1);
    std::uint64_t code = pick(stream);

    // Enumerate pairs (a, b), a < b, over positions of the N - 1 candidates.
    std::size_t a = 0;
    std::uint64_t row = n - 2;
    while (code >= row) {
        code -= row;
        ++a;
        --row;
    }
    const std::size_t b = a + 1 + static_cast<std::size_t>(code);
    auto candidate = [top](std::size_t pos) { return pos < top ? pos : pos + 1; };
    return {candidate(a), candidate(b)};
}

bool merger_suppressed(const MarketState& state, std::size_t i, std::size_t j, const ModelParams& params) {
    if (i == j || i >= state.caps.size() || j >= state.caps.size()) {
        throw ContractViolation("merger needs two distinct valid indices");
    }
    const double total = total_capitalization(state.caps);
    return (state.caps[i] + state.caps[j]) / total >= 1.0 - params.delta;
}

MarketState apply_merger(const MarketState& state, std::size_t i, std::size_t j, const ModelParams& params) {
    if (i > j) {
        std::swap(i, j);
    }
    if (state.caps.size() < 3) {
        throw ContractViolation("a merger needs at least three companies");
    }
    if (merger_suppressed(state, i, j, params)) {
        throw ContractViolation("merger of a suppressed pair");
    }
    MarketState next;
    next.t = state.t;
    next.caps = rename_after_merger<double>(state.caps, i, j, state.caps[i] + state.caps[j]);
    if (state.lineage.size() == state.caps.size()) {
        next.next_lineage = state.next_lineage + 1;
        next.lineage = rename_after_merger<std::uint64_t>(state.lineage, i, j, state.next_lineage);
    }
    return next;
}

std::optional<EventRecord> resolve_events(MarketState& state, const ModelParams& params, MergerClock& clock,
                                          PathStream& stream, bool clock_rang) {
    const auto split_at = detect_split(state, params);
    if (!split_at && !clock_rang) {
        return std::nullopt;
    }

    EventRecord ev;
    ev.time = state.t;
    ev.n_before = state.size();
    ev.caps_before = state.caps;

    if (split_at) {
        if (state.size() + 1 > params.n_max) {
            throw PathError(PathErrorKind::ExplosionGuard,
                            "split at t = " + std::to_string(state.t) + " would exceed n_max = " +
                                std::to_string(params.n_max));
        }
        const SplitDraw draw = sample_split_fraction(params, stream);
        ev.kind = EventKind::Split;
        ev.i = *split_at;
        ev.xi = draw.xi;
        if (!state.lineage.empty()) {
            ev.parents = {state.lineage[ev.i]};
            ev.children = {state.next_lineage, state.next_lineage + 1};
        }
        state = apply_split(state, ev.i, draw);
    } else {
        const auto [i, j] = sample_merger_pair(state, stream);
        ev.i = i;
        ev.j = j;
        if (merger_suppressed(state, i, j, params)) {
            ev.kind = EventKind::SuppressedMerger;
        } else {
            ev.kind = EventKind::Merger;
            if (!state.lineage.empty()) {
                ev.parents = {state.lineage[i], state.lineage[j]};
                ev.children = {state.next_lineage};
            }
            state = apply_merger(state, i, j, params);
        }
    }
    ev.n_after = state.size();
    ev.caps_after = state.caps;
    clock = MergerClock::draw(state.size(), params, stream);
    return ev;
}

std::optional<EventRecord> step_model(MarketState& state, const ModelParams& params, MergerClock& clock,
                                      PathStream& stream, StepWorkspace& ws, double h) {
    ws.resize(state.size());
    for (double& z : ws.noise) {
        z = stream.normal();
    }
    advance(state, params, ws, h);
    const bool rang = clock.remaining <= h;
    clock.remaining -= h;
    return resolve_events(state, params, clock, stream, rang);
}

double next_step_length(double t, double horizon, double dt) noexcept {
    const double left = horizon - t;
    // Absorb rounding in the accumulated time instead of taking a sliver step.
    if (left <= 1e-9 * dt) {
        return 0.0;
    }
    return left < dt * (1.0 + 1e-9) ? left : dt;
}

EventOutcome run_until_event(MarketState state, const ModelParams& params, MergerClock& clock, PathStream& stream,
                             double horizon) {
    state.validate();
    if (auto ev = resolve_events(state, params, clock, stream, false)) {
        return {std::move(state), std::move(ev)};
    }
    StepWorkspace ws;
    for (double h = next_step_length(state.t, horizon, params.dt); h > 0.0;
         h = next_step_length(state.t, horizon, params.dt)) {
        if (auto ev = step_model(state, params, clock, stream, ws, h)) {
            return {std::move(state), std::move(ev)};
        }
    }
    return {std::move(state), std::nullopt};
}

} // namespace divmkt
