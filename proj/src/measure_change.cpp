#include "divmkt/measure_change.hpp"

#include "divmkt/errors.hpp"
#include "divmkt/path_engine.hpp"

#include <cmath>
#include <vector>

namespace divmkt {

double theta(int n, int k, const ModelParams& params, ThetaMode mode) {
    const double s = params.vol(n, k);
    if (s == 0.0) {
        throw ContractViolation("market price of risk needs sigma > 0");
    }
    const double g = params.drift(n, k);
    return mode == ThetaMode::Paper ? g / s : (g + 0.5 * s * s) / s;
}

double theta(int n, int k, const ModelParams& params) { return theta(n, k, params, params.theta_mode); }

double theta_bound(const ModelParams& params, ThetaMode mode) {
    double c = 0.0;
    for (int n = 2; n <= params.n_max; ++n) {
        for (int k = 1; k <= n; ++k) {
            c = std::max(c, std::abs(theta(n, k, params, mode)));
        }
    }
    return c;
}

double GirsanovState::z() const noexcept { return std::exp(log_z()); }

void accumulate(GirsanovState& gs, std::span<const double> theta_row, std::span<const int> rank_of,
                std::span<const double> noise, double h) noexcept {
    const double root_h = std::sqrt(h);
    double m = 0.0;
    double q = 0.0;
    for (std::size_t i = 0; i < noise.size(); ++i) {
        const double th = theta_row[static_cast<std::size_t>(rank_of[i])];
        m += th * noise[i];
        q += th * th;
    }
    gs.m += root_h * m;
    gs.qv += h * q;
}

GirsanovState accumulate(GirsanovState gs, const MarketState& state, const ModelParams& params,
                         std::span<const double> noise, double h) {
    state.validate();
    if (noise.size() != state.caps.size()) {
        throw ContractViolation("noise vector length must equal the company count");
    }
    const int n = state.size();
    const auto ranks = rank(state);
    std::vector<int> rank_of(state.caps.size());
    for (std::size_t r = 0; r < ranks.rank_to_index.size(); ++r) {
        rank_of[ranks.rank_to_index[r]] = static_cast<int>(r);
    }
    std::vector<double> row(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        row[static_cast<std::size_t>(k - 1)] = theta(n, k, params);
    }
    accumulate(gs, row, rank_of, noise, h);
    return gs;
}

bool MartingaleEstimate::consistent(double k) const noexcept {
    return std::abs(z.mean - 1.0) <= k * z.std_error && std::abs(weighted.mean - 1.0) <= k * weighted.std_error;
}

MartingaleEstimate martingale_test(const ModelParams& params, const MarketState& initial, const PortfolioRule& rule,
                                   double horizon, std::size_t paths, std::uint64_t seed, int workers) {
    if (paths == 0) {
        throw ContractViolation("martingale test needs at least one path");
    }
    RuleSet rules;
    rules.push_back(rule.clone());
    PathOptions options;
    options.horizon = horizon;
    const auto results = simulate_paths(params, initial, rules, options, seed, paths, workers);

    MartingaleEstimate out;
    out.portfolio = rule.name();
    out.mode = params.theta_mode;
    std::vector<double> z;
    std::vector<double> zv;
    z.reserve(paths);
    zv.reserve(paths);
    for (const auto& r : results) {
        if (!r.ok()) {
            ++out.failed_paths;
            continue;
        }
        const double zt = r.girsanov(params.theta_mode).z();
        z.push_back(zt);
        zv.push_back(zt * r.wealth[0]);
    }
    out.z = summarize(z);
    out.weighted = summarize(zv);
    return out;
}

} // namespace divmkt
