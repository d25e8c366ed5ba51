#include "divmkt/sde_core.hpp"

#include "divmkt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace divmkt {

MarketState MarketState::from_caps(std::vector<double> caps, double t) {
    MarketState s;
    s.t = t;
    s.caps = std::move(caps);
    s.lineage.resize(s.caps.size());
    std::iota(s.lineage.begin(), s.lineage.end(), std::uint64_t{0});
    s.next_lineage = s.caps.size();
    s.validate();
    return s;
}

MarketState MarketState::equal_caps(int n, double cap) {
    if (n < 2) {
        throw ContractViolation("a market needs at least two companies");
    }
    return from_caps(std::vector<double>(static_cast<std::size_t>(n), cap));
}

void MarketState::validate() const {
    if (caps.size() < 2) {
        throw ContractViolation("a market needs at least two companies");
    }
    for (std::size_t i = 0; i < caps.size(); ++i) {
        if (!(std::isfinite(caps[i]) && caps[i] > 0.0)) {
            std::ostringstream msg;
            msg << "capitalization " << i + 1 << " must be finite and positive, got " << caps[i];
            throw ContractViolation(msg.str());
        }
    }
    if (!lineage.empty() && lineage.size() != caps.size()) {
        throw ContractViolation("lineage ids do not match the company count");
    }
}

void rank_into(std::span<const double> caps, std::vector<std::size_t>& order) {
    const std::size_t n = caps.size();
    if (order.size() != n) {
        order.resize(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
    }
    auto before = [&caps](std::size_t a, std::size_t b) {
        return caps[a] > caps[b] || (caps[a] == caps[b] && a < b);
    };
    for (std::size_t r = 1; r < n; ++r) {
        const std::size_t idx = order[r];
        std::size_t q = r;
        while (q > 0 && before(idx, order[q - 1])) {
            order[q] = order[q - 1];
            --q;
        }
        order[q] = idx;
    }
}

RankAssignment rank(const MarketState& state) {
    state.validate();
    RankAssignment out;
    rank_into(state.caps, out.rank_to_index);
    return out;
}

double total_capitalization(std::span<const double> caps) noexcept {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : caps) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

std::vector<double> market_weights(const MarketState& state) {
    state.validate();
    const double total = total_capitalization(state.caps);
    std::vector<double> w(state.caps.size());
    std::transform(state.caps.begin(), state.caps.end(), w.begin(), [total](double x) { return x / total; });
    return w;
}

void StepWorkspace::resize(int n) {
    const auto m = static_cast<std::size_t>(n);
    if (order.size() != m) {
        order.clear();
    }
    rank_of.resize(m);
    noise.resize(m);
    prev_caps.resize(m);
}

void advance(MarketState& state, const ModelParams& params, StepWorkspace& ws, double h) {
    const int n = state.size();
    if (n < 2) {
        throw ContractViolation("euler step needs at least two companies");
    }
    if (ws.noise.size() != state.caps.size()) {
        throw ContractViolation("noise vector length must equal the company count");
    }
    ws.resize(n);
    std::copy(state.caps.begin(), state.caps.end(), ws.prev_caps.begin());
    rank_into(state.caps, ws.order);
    for (int r = 0; r < n; ++r) {
        ws.rank_of[ws.order[static_cast<std::size_t>(r)]] = r;
    }

    const auto g = params.drift.row(n);
    const auto s = params.vol.row(n);
    const double root_h = std::sqrt(h);
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(ws.rank_of[static_cast<std::size_t>(i)]);
        double& x = state.caps[static_cast<std::size_t>(i)];
        x *= std::exp(g[k] * h + s[k] * root_h * ws.noise[static_cast<std::size_t>(i)]);
        if (!(std::isfinite(x) && x > 0.0)) {
            std::ostringstream msg;
            msg << "capitalization " << i + 1 << " left the representable range at t = " << state.t + h;
            throw PathError(PathErrorKind::Overflow, msg.str());
        }
    }
    state.t += h;
}

MarketState euler_step(const MarketState& state, const ModelParams& params, std::span<const double> noise,
                       double h) {
    state.validate();
    if (noise.size() != state.caps.size()) {
        throw ContractViolation("noise vector length must equal the company count");
    }
    MarketState next = state;
    StepWorkspace ws;
    ws.resize(state.size());
    std::copy(noise.begin(), noise.end(), ws.noise.begin());
    advance(next, params, ws, h);
    return next;
}

MarketState euler_step(const MarketState& state, const ModelParams& params, std::span<const double> noise) {
    return euler_step(state, params, noise, params.dt);
}

double excess_growth_rate(const MarketState& state, const ModelParams& params) {
    const auto w = market_weights(state);
    std::vector<double> ranked = w;
    std::sort(ranked.begin(), ranked.end(), std::greater<>());
    const int n = state.size();
    double sum = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double s = params.vol(n, k);
        const double m = ranked[static_cast<std::size_t>(k - 1)];
        sum += s * s * m * (1.0 - m);
    }
    return 0.5 * sum;
}

} // namespace divmkt
