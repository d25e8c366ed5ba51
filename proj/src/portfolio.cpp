#include "divmkt/portfolio.hpp"

#include "divmkt/errors.hpp"
#include "divmkt/path_engine.hpp"
#include "divmkt/renaming.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace divmkt {

double money_market_weight(std::span<const double> pi) noexcept {
    double s = 0.0;
    for (double w : pi) {
        s += w;
    }
    return 1.0 - s;
}

double wealth_step(double wealth, std::span<const double> pi, std::span<const double> returns) {
    if (pi.size() != returns.size()) {
        throw ContractViolation("portfolio and return vectors differ in length");
    }
    double growth = 1.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        growth += pi[i] * returns[i];
    }
    const double next = wealth * growth;
    if (!(next > 0.0) || !std::isfinite(next)) {
        std::ostringstream msg;
        msg << "wealth left (0, inf): " << next << "; the time step is too coarse for the leverage used";
        throw PathError(PathErrorKind::NonPositiveWealth, msg.str());
    }
    return next;
}

std::vector<double> transfer_on_merger(std::span<const double> pi, std::size_t i, std::size_t j) {
    if (i > j) {
        std::swap(i, j);
    }
    return rename_after_merger<double>(pi, i, j, pi[i] + pi[j]);
}

std::vector<double> transfer_on_split(std::span<const double> pi, std::size_t i, std::span<const double> caps_before,
                                      std::span<const double> caps_after) {
    if (caps_after.size() != caps_before.size() + 1 || pi.size() != caps_before.size() || i >= pi.size()) {
        throw ContractViolation("split transfer needs N weights, N caps before and N + 1 caps after");
    }
    const double first = pi[i] * (caps_after[caps_after.size() - 2] / caps_before[i]);
    // Children caps sum to the parent exactly, so this is pi_i X_{N+1} / X_i.
    const double second = pi[i] - first;
    return rename_after_split<double>(pi, i, first, second);
}

std::vector<double> transfer_on_event(std::span<const double> pi, const EventRecord& event) {
    switch (event.kind) {
    case EventKind::Split:
        return transfer_on_split(pi, event.i, event.caps_before, event.caps_after);
    case EventKind::Merger:
        return transfer_on_merger(pi, event.i, event.j);
    case EventKind::SuppressedMerger:
        break;
    }
    return {pi.begin(), pi.end()};
}

void PortfolioRule::on_event(const EventRecord&, std::span<const double>) {}

namespace {

class CashRule final : public PortfolioRule {
public:
    std::string name() const override { return "cash"; }
    double bound() const override { return 0.0; }
    void weights(const MarketState& s, std::span<const std::size_t>, std::vector<double>& out) const override {
        out.assign(s.caps.size(), 0.0);
    }
    std::unique_ptr<PortfolioRule> clone() const override { return std::make_unique<CashRule>(*this); }
};

class MarketRule final : public PortfolioRule {
public:
    std::string name() const override { return "market"; }
    double bound() const override { return 1.0; }
    void weights(const MarketState& s, std::span<const std::size_t>, std::vector<double>& out) const override {
        const double total = total_capitalization(s.caps);
        out.resize(s.caps.size());
        for (std::size_t i = 0; i < s.caps.size(); ++i) {
            out[i] = s.caps[i] / total;
        }
    }
    std::unique_ptr<PortfolioRule> clone() const override { return std::make_unique<MarketRule>(*this); }
};

class EqualWeightRule final : public PortfolioRule {
public:
    std::string name() const override { return "equal"; }
    double bound() const override { return 0.5; }
    void weights(const MarketState& s, std::span<const std::size_t>, std::vector<double>& out) const override {
        out.assign(s.caps.size(), 1.0 / static_cast<double>(s.caps.size()));
    }
    std::unique_ptr<PortfolioRule> clone() const override { return std::make_unique<EqualWeightRule>(*this); }
};

class RankTiltRule final : public PortfolioRule {
public:
    explicit RankTiltRule(int k) : k_(k) {
        if (k < 1) {
            throw ContractViolation("rank tilt needs k >= 1");
        }
    }
    std::string name() const override { return "rank:" + std::to_string(k_); }
    double bound() const override { return 1.0; }
    void weights(const MarketState& s, std::span<const std::size_t> rank_to_index,
                 std::vector<double>& out) const override {
        out.assign(s.caps.size(), 0.0);
        if (static_cast<std::size_t>(k_) <= rank_to_index.size()) {
            out[rank_to_index[static_cast<std::size_t>(k_ - 1)]] = 1.0;
        }
    }
    std::unique_ptr<PortfolioRule> clone() const override { return std::make_unique<RankTiltRule>(*this); }

private:
    int k_;
};

class ConstantMixRule final : public PortfolioRule {
public:
    explicit ConstantMixRule(double total) : total_(total) {}
    std::string name() const override {
        std::ostringstream s;
        s << "constant-mix:" << total_;
        return s.str();
    }
    // Transfers only split or add weights, so no entry exceeds the total.
    double bound() const override { return std::abs(total_); }
    void weights(const MarketState& s, std::span<const std::size_t>, std::vector<double>& out) const override {
        if (held_.empty()) {
            held_.assign(s.caps.size(), total_ / static_cast<double>(s.caps.size()));
        }
        if (held_.size() != s.caps.size()) {
            throw ContractViolation("constant-mix rule out of step with the company count");
        }
        out = held_;
    }
    void on_event(const EventRecord& event, std::span<const double> weights_before) override {
        held_ = transfer_on_event(weights_before, event);
    }
    std::unique_ptr<PortfolioRule> clone() const override { return std::make_unique<ConstantMixRule>(total_); }

private:
    double total_;
    mutable std::vector<double> held_;
};

double parse_number(std::string_view text, std::string_view what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return v;
}

} // namespace

std::unique_ptr<PortfolioRule> make_cash() { return std::make_unique<CashRule>(); }
std::unique_ptr<PortfolioRule> make_market() { return std::make_unique<MarketRule>(); }
std::unique_ptr<PortfolioRule> make_equal_weight() { return std::make_unique<EqualWeightRule>(); }
std::unique_ptr<PortfolioRule> make_rank_tilt(int k) { return std::make_unique<RankTiltRule>(k); }
std::unique_ptr<PortfolioRule> make_constant_mix(double total_weight) {
    return std::make_unique<ConstantMixRule>(total_weight);
}

std::unique_ptr<PortfolioRule> make_rule(std::string_view spec) {
    if (spec == "cash") {
        return make_cash();
    }
    if (spec == "market") {
        return make_market();
    }
    if (spec == "equal") {
        return make_equal_weight();
    }
    if (spec.starts_with("rank:")) {
        const double k = parse_number(spec.substr(5), "rank");
        if (k < 1 || k != std::floor(k)) {
            throw std::invalid_argument("rank tilt needs a positive integer rank, got '" + std::string(spec) + "'");
        }
        return make_rank_tilt(static_cast<int>(k));
    }
    if (spec.starts_with("constant-mix:")) {
        return make_constant_mix(parse_number(spec.substr(13), "constant-mix weight"));
    }
    throw std::invalid_argument("unknown portfolio rule '" + std::string(spec) + "'");
}

ArbitrageProbe relative_arbitrage_probe(const ModelParams& params, const MarketState& initial,
                                        const PortfolioRule& pi, const PortfolioRule& rho, double horizon,
                                        std::size_t paths, std::uint64_t seed, int workers) {
    if (paths == 0) {
        throw ContractViolation("relative arbitrage probe needs at least one path");
    }
    RuleSet rules;
    rules.push_back(pi.clone());
    rules.push_back(rho.clone());
    PathOptions options;
    options.horizon = horizon;
    const auto results = simulate_paths(params, initial, rules, options, seed, paths, workers);

    std::size_t ge = 0;
    std::size_t gt = 0;
    std::size_t ok = 0;
    ArbitrageProbe out;
    for (const auto& r : results) {
        if (!r.ok()) {
            ++out.failed_paths;
            continue;
        }
        ++ok;
        ge += r.wealth[0] >= r.wealth[1] ? 1 : 0;
        gt += r.wealth[0] > r.wealth[1] ? 1 : 0;
    }
    if (ok == 0) {
        throw PathError(PathErrorKind::Overflow, "every path of the relative arbitrage probe failed");
    }
    out.at_least = proportion(ge, ok);
    out.beats = proportion(gt, ok);
    return out;
}

} // namespace divmkt
