#include "divmkt/path_engine.hpp"

#include "divmkt/errors.hpp"
#include "divmkt/parallel.hpp"
#include "divmkt/random.hpp"

#include <algorithm>
#include <cmath>

namespace divmkt {

std::string_view to_string(PathStatus status) noexcept {
    switch (status) {
    case PathStatus::Ok:
        return "ok";
    case PathStatus::ExplosionGuard:
        return "explosion-guard";
    case PathStatus::Overflow:
        return "overflow";
    case PathStatus::NonPositiveWealth:
        return "non-positive-wealth";
    }
    return "unknown";
}

RuleSet clone_rules(const RuleSet& rules) {
    RuleSet out;
    out.reserve(rules.size());
    for (const auto& r : rules) {
        out.push_back(r->clone());
    }
    return out;
}

namespace {

struct ThetaRows {
    int n = 0;
    std::vector<double> martingale;
    std::vector<double> paper;

    void refresh(int count, const ModelParams& params) {
        if (count == n) {
            return;
        }
        n = count;
        martingale.resize(static_cast<std::size_t>(n));
        paper.resize(static_cast<std::size_t>(n));
        for (int k = 1; k <= n; ++k) {
            martingale[static_cast<std::size_t>(k - 1)] = theta(n, k, params, ThetaMode::Martingale);
            paper[static_cast<std::size_t>(k - 1)] = theta(n, k, params, ThetaMode::Paper);
        }
    }
};

double top_weight(std::span<const double> caps) {
    return *std::max_element(caps.begin(), caps.end()) / total_capitalization(caps);
}

double ulps_between(double a, double b) {
    const double ulp = std::nextafter(a, std::numeric_limits<double>::infinity()) - a;
    return std::abs(b - a) / ulp;
}

class PathRunner {
public:
    PathRunner(const ModelParams& params, const MarketState& initial, const RuleSet& rules,
               const PathOptions& options, std::uint64_t seed, std::uint64_t path)
        : params_(params), options_(options), stream_(seed, path), state_(initial), rules_(clone_rules(rules)) {
        result_.path = path;
        result_.wealth.assign(rules_.size(), 1.0);
        weights_.resize(rules_.size());
        theta_c_ = theta_bound(params_, params_.theta_mode);
    }

    PathResult run() {
        state_.validate();
        result_.cap_initial = total_capitalization(state_.caps);
        result_.max_count = state_.size();
        const std::vector<double> caps0 = state_.caps;
        try {
            clock_ = options_.events_enabled ? MergerClock::draw(state_.size(), params_, stream_)
                                             : MergerClock{std::numeric_limits<double>::infinity()};
            if (options_.events_enabled) {
                // A state handed in at the threshold splits at t = 0+.
                auto ev = resolve_events(state_, params_, clock_, stream_, false);
                if (ev) {
                    on_event(*ev);
                }
            }
            note_weights();
            sample();

            std::size_t step = 0;
            for (double h = next_step_length(state_.t, options_.horizon, params_.dt); h > 0.0;
                 h = next_step_length(state_.t, options_.horizon, params_.dt)) {
                take_step(h);
                ++step;
                const bool last = next_step_length(state_.t, options_.horizon, params_.dt) == 0.0;
                if (options_.series_stride > 0 && (step % options_.series_stride == 0 || last)) {
                    sample();
                }
            }
        } catch (const PathError& e) {
            switch (e.kind()) {
            case PathErrorKind::ExplosionGuard:
                result_.status = PathStatus::ExplosionGuard;
                result_.max_count = params_.n_max + 1;
                break;
            case PathErrorKind::Overflow:
                result_.status = PathStatus::Overflow;
                break;
            case PathErrorKind::NonPositiveWealth:
                result_.status = PathStatus::NonPositiveWealth;
                break;
            }
            result_.diagnostic = e.what();
        }

        result_.t_end = state_.t;
        result_.n_end = state_.size();
        result_.cap_final = total_capitalization(state_.caps);
        if (options_.single_names && state_.caps.size() == caps0.size()) {
            result_.single_name_ratio.resize(caps0.size());
            for (std::size_t i = 0; i < caps0.size(); ++i) {
                result_.single_name_ratio[i] = state_.caps[i] / caps0[i];
            }
        }
        return std::move(result_);
    }

private:
    void take_step(double h) {
        const int n = state_.size();
        ws_.resize(n);
        rank_into(state_.caps, ws_.order);
        for (std::size_t r = 0; r < rules_.size(); ++r) {
            rules_[r]->weights(state_, ws_.order, weights_[r]);
        }
        const double cap_before = total_capitalization(state_.caps);

        for (double& z : ws_.noise) {
            z = stream_.normal();
        }
        advance(state_, params_, ws_, h);

        returns_.resize(static_cast<std::size_t>(n));
        double market_growth = 0.0;
        for (std::size_t i = 0; i < returns_.size(); ++i) {
            returns_[i] = state_.caps[i] / ws_.prev_caps[i] - 1.0;
            market_growth += ws_.prev_caps[i] / cap_before * returns_[i];
        }
        result_.market_wealth *= 1.0 + market_growth;
        for (std::size_t r = 0; r < rules_.size(); ++r) {
            result_.wealth[r] = wealth_step(result_.wealth[r], weights_[r], returns_);
        }

        thetas_.refresh(n, params_);
        accumulate(result_.martingale, thetas_.martingale, ws_.rank_of, ws_.noise, h);
        accumulate(result_.paper, thetas_.paper, ws_.rank_of, ws_.noise, h);
        const GirsanovState& gs = result_.girsanov(params_.theta_mode);
        const double elapsed = state_.t;
        if (elapsed > 0.0 && theta_c_ > 0.0) {
            const double cap = theta_c_ * theta_c_ * elapsed * static_cast<double>(result_.max_count);
            result_.diag.max_qv_ratio = std::max(result_.diag.max_qv_ratio, gs.qv / cap);
        }
        result_.diag.min_z = std::min(result_.diag.min_z, gs.z());

        if (options_.events_enabled) {
            const bool rang = clock_.remaining <= h;
            clock_.remaining -= h;
            if (auto ev = resolve_events(state_, params_, clock_, stream_, rang)) {
                on_event(*ev);
            }
        }
        note_weights();
    }

    void on_event(const EventRecord& ev) {
        PathDiagnostics& d = result_.diag;
        const double before = total_capitalization(ev.caps_before);
        const double after = total_capitalization(ev.caps_after);
        d.max_cap_change_ulps = std::max(d.max_cap_change_ulps, ulps_between(before, after));

        switch (ev.kind) {
        case EventKind::Split:
            ++d.splits;
            d.max_split_overshoot =
                std::max(d.max_split_overshoot, std::log(ev.caps_before[ev.i] / before) - std::log1p(-params_.delta));
            break;
        case EventKind::Merger:
            ++d.mergers;
            break;
        case EventKind::SuppressedMerger:
            ++d.suppressed;
            if (ev.n_before >= 3) {
                ++d.suppressed_three_plus;
            }
            break;
        }

        if (!rules_.empty()) {
            MarketState pre = MarketState::from_caps(ev.caps_before, ev.time);
            std::vector<std::size_t> order;
            rank_into(pre.caps, order);
            const std::vector<double> wealth_before = result_.wealth;
            std::vector<double> pi;
            for (auto& rule : rules_) {
                rule->weights(pre, order, pi);
                const auto moved = transfer_on_event(pi, ev);
                const double change = std::abs(money_market_weight(moved) - money_market_weight(pi));
                d.max_allocation_change = std::max(d.max_allocation_change, change);
                rule->on_event(ev, pi);
            }
            d.wealth_continuous = d.wealth_continuous && wealth_before == result_.wealth;
        }

        result_.max_count = std::max(result_.max_count, ev.n_after);
        if (options_.record_events) {
            result_.events.push_back(ev);
        }
    }

    void note_weights() { result_.diag.max_weight = std::max(result_.diag.max_weight, top_weight(state_.caps)); }

    void sample() {
        if (options_.series_stride == 0) {
            return;
        }
        SeriesSample s;
        s.t = state_.t;
        s.n = state_.size();
        s.top_weight = top_weight(state_.caps);
        s.market_wealth = result_.market_wealth;
        s.wealth = result_.wealth;
        s.z = result_.girsanov(params_.theta_mode).z();
        result_.series.push_back(std::move(s));
    }

    const ModelParams& params_;
    const PathOptions& options_;
    PathStream stream_;
    MarketState state_;
    RuleSet rules_;
    MergerClock clock_;
    StepWorkspace ws_;
    ThetaRows thetas_;
    std::vector<std::vector<double>> weights_;
    std::vector<double> returns_;
    double theta_c_ = 0.0;
    PathResult result_;
};

} // namespace

PathResult simulate_path(const ModelParams& params, const MarketState& initial, const RuleSet& rules,
                         const PathOptions& options, std::uint64_t seed, std::uint64_t path) {
    if (!(options.horizon >= initial.t)) {
        throw ContractViolation("horizon lies before the initial time");
    }
    return PathRunner(params, initial, rules, options, seed, path).run();
}

std::vector<PathResult> simulate_paths(const ModelParams& params, const MarketState& initial, const RuleSet& rules,
                                       const PathOptions& options, std::uint64_t seed, std::size_t count,
                                       int workers) {
    return run_indexed(count, workers, [&](std::size_t p) {
        return simulate_path(params, initial, rules, options, seed, static_cast<std::uint64_t>(p));
    });
}

} // namespace divmkt
