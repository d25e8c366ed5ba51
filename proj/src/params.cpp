#include "divmkt/params.hpp"

#include "divmkt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace divmkt {

std::string_view to_string(ThetaMode mode) noexcept {
    return mode == ThetaMode::Paper ? "paper" : "martingale";
}

ThetaMode parse_theta_mode(std::string_view text) {
    if (text == "paper") {
        return ThetaMode::Paper;
    }
    if (text == "martingale") {
        return ThetaMode::Martingale;
    }
    throw std::invalid_argument("theta_mode must be 'paper' or 'martingale', got '" + std::string(text) + "'");
}

std::string_view to_string(SplitDistribution::Kind kind) noexcept {
    switch (kind) {
    case SplitDistribution::Kind::Uniform:
        return "uniform";
    case SplitDistribution::Kind::Half:
        return "half";
    case SplitDistribution::Kind::Beta:
        return "beta";
    }
    return "unknown";
}

double LinearFamily::at(int n, int k) const noexcept {
    return intercept + slope * static_cast<double>(k - 1) / static_cast<double>(n - 1);
}

RankTable::RankTable(int n_max, double fill) : n_max_(n_max) {
    if (n_max < 2) {
        throw ContractViolation("RankTable needs n_max >= 2");
    }
    values_.assign(offset(n_max + 1), fill);
}

RankTable RankTable::from_family(int n_max, const LinearFamily& family) {
    RankTable table(n_max);
    for (int n = 2; n <= n_max; ++n) {
        for (int k = 1; k <= n; ++k) {
            table.at(n, k) = family.at(n, k);
        }
    }
    return table;
}

double RankTable::operator()(int n, int k) const {
    if (!covers(n) || k < 1 || k > n) {
        throw ContractViolation("rank table lookup (" + std::to_string(n) + ", " + std::to_string(k) +
                                ") outside N = 2.." + std::to_string(n_max_));
    }
    return values_[offset(n) + static_cast<std::size_t>(k - 1)];
}

double& RankTable::at(int n, int k) {
    if (!covers(n) || k < 1 || k > n) {
        throw ContractViolation("rank table lookup (" + std::to_string(n) + ", " + std::to_string(k) +
                                ") outside N = 2.." + std::to_string(n_max_));
    }
    return values_[offset(n) + static_cast<std::size_t>(k - 1)];
}

std::span<const double> RankTable::row(int n) const {
    if (!covers(n)) {
        throw ContractViolation("rank table has no row for N = " + std::to_string(n));
    }
    return {values_.data() + offset(n), static_cast<std::size_t>(n)};
}

std::span<double> RankTable::row(int n) {
    if (!covers(n)) {
        throw ContractViolation("rank table has no row for N = " + std::to_string(n));
    }
    return {values_.data() + offset(n), static_cast<std::size_t>(n)};
}

double RankTable::min() const {
    if (values_.empty()) {
        throw ContractViolation("empty rank table");
    }
    return *std::min_element(values_.begin(), values_.end());
}

double RankTable::max() const {
    if (values_.empty()) {
        throw ContractViolation("empty rank table");
    }
    return *std::max_element(values_.begin(), values_.end());
}

double ModelParams::sigma_max(int n) const {
    const auto r = vol.row(n);
    return *std::max_element(r.begin(), r.end());
}

std::vector<std::string> ModelParams::violations() const {
    std::vector<std::string> out;
    auto add = [&out](const std::string& s) { out.push_back(s); };

    if (n_max < 3) {
        add("n_max must be at least 3");
    }
    if (drift.n_max() != n_max || vol.n_max() != n_max) {
        add("drift and volatility tables must cover N = 2..n_max");
        return out;
    }

    bool finite = true;
    for (int n = 2; n <= n_max; ++n) {
        for (int k = 1; k <= n; ++k) {
            finite = finite && std::isfinite(drift(n, k)) && std::isfinite(vol(n, k));
        }
    }
    if (!finite) {
        add("coefficients: every drift and volatility entry must be finite");
    }

    for (int n = 2; n <= n_max; ++n) {
        const auto g = drift.row(n);
        const double rest = *std::min_element(g.begin() + 1, g.end());
        if (g[0] > rest) {
            std::ostringstream msg;
            msg << "leader drift: g(N,1) <= min_{2<=k<=N} g(N,k) fails at N = " << n << " (g(N,1) = "
                << g[0] << ", min = " << rest << ")";
            add(msg.str());
            break;
        }
    }

    if (finite && !(vol.min() > 0.0)) {
        add("volatility: sigma(N,k) must be strictly positive");
    }
    if (!(delta > 0.0 && delta < 1.0 / 6.0)) {
        add("split threshold: delta in (0, 1/6)");
    }
    if (!(eps0 > 0.0 && eps0 < 0.5)) {
        add("split law: eps0 in (0, 1/2)");
    }
    if (split.kind == SplitDistribution::Kind::Beta && !(split.beta_a > 0.0 && split.beta_b > 0.0)) {
        add("split law: Beta split shape parameters must be positive");
    }
    if (!(clock_alpha > 0.0)) {
        add("merger clock: exponent alpha > 0");
    }
    if (!(clock_c >= 0.0) || !std::isfinite(clock_c)) {
        add("merger clock: constant c >= 0");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        add("time step dt must be positive");
    }
    return out;
}

ModelParams make_linear_model(int n_max, LinearFamily drift, LinearFamily vol, double delta, double eps0,
                              double clock_c, double clock_alpha, double dt) {
    ModelParams p;
    p.n_max = n_max;
    p.drift = RankTable::from_family(n_max, drift);
    p.vol = RankTable::from_family(n_max, vol);
    p.delta = delta;
    p.eps0 = eps0;
    p.clock_c = clock_c;
    p.clock_alpha = clock_alpha;
    p.dt = dt;
    return p;
}

} // namespace divmkt
